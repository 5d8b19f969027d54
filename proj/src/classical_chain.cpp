#include "emc/classical_chain.hpp"

#include "emc/errors.hpp"

#include <Eigen/Sparse>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace emc {

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty())
        throw ValidationError("alphabet must contain at least one label");
    std::set<std::string> seen;
    for (const auto &l : labels_)
        if (!seen.insert(l).second)
            throw ValidationError("duplicate alphabet label '" + l + "'");
}

Alphabet Alphabet::numbered(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i)
        labels[i] = std::to_string(i);
    return Alphabet(std::move(labels));
}

std::size_t Alphabet::index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw ValidationError("unknown label '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

// -------------------------------------------------------- StochasticMatrix

StochasticMatrix::StochasticMatrix(Alphabet alphabet, Eigen::MatrixXd entries, const Tolerances &tol)
    : alphabet_(std::move(alphabet)), entries_(std::move(entries)) {
    const auto n = static_cast<Eigen::Index>(alphabet_.size());
    if (entries_.rows() != n || entries_.cols() != n)
        throw ValidationError("matrix is " + std::to_string(entries_.rows()) + "x" +
                              std::to_string(entries_.cols()) + " but alphabet has " + std::to_string(n) +
                              " labels");
    deficiency_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = entries_(i, j);
            if (!std::isfinite(v))
                throw ValidationError("non-finite entry at row " + std::to_string(i) + ", col " +
                                      std::to_string(j));
            if (v < 0.0)
                throw ValidationError("negative entry " + std::to_string(v) + " at row " + std::to_string(i) +
                                      ", col " + std::to_string(j));
        }
        const double s = entries_.row(i).sum();
        if (s > 1.0 + tol.stochastic_tol)
            throw ValidationError("row " + std::to_string(i) + " sums to " + std::to_string(s) + " > 1");
        deficiency_(i) = (std::abs(1.0 - s) <= tol.stochastic_tol) ? 0.0 : 1.0 - s;
    }
}

bool StochasticMatrix::exact() const { return (deficiency_.array() == 0.0).all(); }

// ------------------------------------------------------------------ loading

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

} // namespace

StochasticMatrix parse_csv_matrix(std::string_view text, const Tolerances &tol) {
    std::string normalized(text);
    std::replace(normalized.begin(), normalized.end(), '\n', ';');
    std::vector<std::vector<double>> rows;
    for (const auto &raw_row : split(normalized, ';')) {
        const auto row_text = trim(raw_row);
        if (row_text.empty() || row_text.front() == '#')
            continue;
        std::vector<double> row;
        for (const auto &cell : split(row_text, ',')) {
            const auto c = trim(cell);
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size())
                    throw std::invalid_argument(c);
            } catch (const std::exception &) {
                throw ValidationError("CSV row " + std::to_string(rows.size()) + ": cannot parse '" + c + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ValidationError("CSV matrix is empty");
    const std::size_t n = rows.size();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw ValidationError("CSV row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                  " entries, expected " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = rows[i][j];
    }
    return StochasticMatrix(Alphabet::numbered(n), std::move(m), tol);
}

StochasticMatrix parse_json_matrix(std::string_view text, const Tolerances &tol) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ValidationError(std::string("matrix JSON: ") + e.what());
    }
    try {
        const auto n = j.at("n").get<std::size_t>();
        if (n == 0)
            throw ValidationError("matrix JSON: n must be positive");
        Alphabet alphabet = j.contains("labels") ? Alphabet(j.at("labels").get<std::vector<std::string>>())
                                                 : Alphabet::numbered(n);
        if (alphabet.size() != n)
            throw ValidationError("matrix JSON: " + std::to_string(alphabet.size()) + " labels for n = " +
                                  std::to_string(n));
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        std::size_t k = 0;
        for (const auto &t : j.at("entries")) {
            if (!t.is_array() || t.size() != 3)
                throw ValidationError("matrix JSON: entry " + std::to_string(k) + " is not [i, j, value]");
            const auto r = t[0].get<std::size_t>();
            const auto c = t[1].get<std::size_t>();
            if (r >= n || c >= n)
                throw ValidationError("matrix JSON: entry " + std::to_string(k) + " index out of range");
            if (!t[2].is_number())
                throw ValidationError("matrix JSON: entry " + std::to_string(k) + " value is not real");
            m(r, c) += t[2].get<double>();
            ++k;
        }
        return StochasticMatrix(std::move(alphabet), std::move(m), tol);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("matrix JSON: ") + e.what());
    }
}

StochasticMatrix load_matrix(const std::string &source, const Tolerances &tol) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_regular_file(source, ec)) {
        std::ifstream in(source, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        const auto text = ss.str();
        const auto first = text.find_first_not_of(" \t\r\n");
        if (fs::path(source).extension() == ".json" || (first != std::string::npos && text[first] == '{'))
            return parse_json_matrix(text, tol);
        return parse_csv_matrix(text, tol);
    }
    if (source.find(',') != std::string::npos || source.find(';') != std::string::npos)
        return parse_csv_matrix(source, tol);
    throw ValidationError("matrix source '" + source + "' is neither a file nor inline CSV");
}

// ----------------------------------------------------------- classification

namespace {

std::vector<IndexSet> support_graph(const StochasticMatrix &p, const Tolerances &tol) {
    const auto n = p.size();
    std::vector<IndexSet> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (p(i, j) > tol.support_tol)
                adj[i].push_back(j);
    return adj;
}

bool contains(const IndexSet &sorted, std::size_t v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

} // namespace

std::vector<IndexSet> communication_classes(const StochasticMatrix &p, const Tolerances &tol) {
    // Iterative Tarjan.
    const auto n = p.size();
    const auto adj = support_graph(p, tol);
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<IndexSet> classes;
    std::size_t counter = 0;

    struct Frame {
        std::size_t v;
        std::size_t edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto &f = call.back();
            if (f.edge < adj[f.v].size()) {
                const auto w = adj[f.v][f.edge++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const auto v = f.v;
            call.pop_back();
            if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                IndexSet cls;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    cls.push_back(w);
                } while (w != v);
                std::sort(cls.begin(), cls.end());
                classes.push_back(std::move(cls));
            }
        }
    }
    std::sort(classes.begin(), classes.end(), [](const IndexSet &a, const IndexSet &b) { return a.front() < b.front(); });
    return classes;
}

ChainDecomposition classify_states(const StochasticMatrix &p, const Tolerances &tol) {
    ChainDecomposition d;
    d.size = p.size();
    d.communication = communication_classes(p, tol);
    for (const auto &cls : d.communication) {
        double outgoing = 0.0;
        double deficiency = 0.0;
        for (auto i : cls) {
            deficiency += p.deficiency()(static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < p.size(); ++j)
                if (!contains(cls, j))
                    outgoing += p(i, j);
        }
        if (outgoing <= tol.closure_tol && deficiency == 0.0) {
            d.recurrent_id.push_back(static_cast<int>(d.classes.size()));
            d.classes.push_back(RecurrentClass{cls, 1, {}, {}});
        } else {
            d.recurrent_id.push_back(-1);
            d.transient.insert(d.transient.end(), cls.begin(), cls.end());
        }
    }
    std::sort(d.transient.begin(), d.transient.end());
    return d;
}

namespace {

// BFS levels from the minimal index, restricted to the class.
std::vector<long> class_levels(const std::vector<IndexSet> &adj, const IndexSet &cls, std::size_t n) {
    std::vector<long> level(n, -1);
    std::vector<std::size_t> queue{cls.front()};
    level[cls.front()] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto u = queue[head];
        for (auto v : adj[u])
            if (level[v] < 0 && contains(cls, v)) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
    }
    return level;
}

} // namespace

std::size_t period_of_class(const StochasticMatrix &p, const IndexSet &cls, const Tolerances &tol) {
    if (cls.empty())
        throw ValidationError("period_of_class: empty class");
    IndexSet sorted = cls;
    std::sort(sorted.begin(), sorted.end());
    const auto adj = support_graph(p, tol);
    const auto level = class_levels(adj, sorted, p.size());
    for (auto v : sorted)
        if (level[v] < 0)
            throw ValidationError("period_of_class: state " + std::to_string(v) + " not reachable within the class");
    long g = 0;
    bool has_edge = false;
    for (auto u : sorted)
        for (auto v : adj[u])
            if (contains(sorted, v)) {
                has_edge = true;
                g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
            }
    if (!has_edge || g == 0)
        throw ValidationError("period_of_class: class has no internal cycle (not strongly connected)");
    // Strong connectivity: every state must reach the root (reverse BFS).
    std::vector<bool> back(p.size(), false);
    std::vector<std::size_t> queue{sorted.front()};
    back[sorted.front()] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        for (auto u : sorted)
            if (!back[u] && p(u, v) > tol.support_tol) {
                back[u] = true;
                queue.push_back(u);
            }
    }
    for (auto v : sorted)
        if (!back[v])
            throw ValidationError("period_of_class: state " + std::to_string(v) + " cannot return to " +
                                  std::to_string(sorted.front()));
    return static_cast<std::size_t>(g);
}

std::vector<IndexSet> cyclic_subclasses(const StochasticMatrix &p, const IndexSet &cls, std::size_t period,
                                        const Tolerances &tol) {
    if (period == 0)
        throw ValidationError("cyclic_subclasses: period must be positive");
    IndexSet sorted = cls;
    std::sort(sorted.begin(), sorted.end());
    const auto adj = support_graph(p, tol);
    const auto level = class_levels(adj, sorted, p.size());
    std::vector<IndexSet> sub(period);
    for (auto v : sorted) {
        if (level[v] < 0)
            throw ValidationError("cyclic_subclasses: state " + std::to_string(v) + " unreachable in class");
        sub[static_cast<std::size_t>(level[v]) % period].push_back(v);
    }
    for (std::size_t j = 0; j < period; ++j) {
        if (sub[j].empty())
            throw InvariantViolation("period consistency", "subclass " + std::to_string(j) + " is empty for period " +
                                                                std::to_string(period));
        const auto &next = sub[(j + 1) % period];
        for (auto u : sub[j])
            for (auto v : adj[u])
                if (contains(sorted, v) && !contains(next, v))
                    throw InvariantViolation("period consistency", "edge " + std::to_string(u) + "->" +
                                                                       std::to_string(v) + " breaks the cycle order");
    }
    return sub;
}

namespace {

Eigen::VectorXd embed(const Eigen::VectorXd &local, const IndexSet &cls, std::size_t n) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < cls.size(); ++a)
        full(static_cast<Eigen::Index>(cls[a])) = local(static_cast<Eigen::Index>(a));
    return full;
}

Eigen::VectorXd stationary_direct(const Eigen::MatrixXd &block) {
    const auto c = block.rows();
    Eigen::MatrixXd a = block.transpose() - Eigen::MatrixXd::Identity(c, c);
    a.row(c - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(c);
    rhs(c - 1) = 1.0;
    return a.fullPivLu().solve(rhs);
}

Eigen::VectorXd stationary_power(const Eigen::MatrixXd &block, std::size_t period, const Tolerances &tol) {
    const auto c = block.rows();
    Eigen::SparseMatrix<double> pt = block.transpose().sparseView(1.0, tol.support_tol);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(c, 1.0 / static_cast<double>(c));
    Eigen::VectorXd x(c);
    double residual = 0.0;
    for (std::size_t it = 0; it < tol.max_iters; ++it) {
        // Cesaro average over one period of the m-step chain.
        x.setZero();
        Eigen::VectorXd z = y;
        for (std::size_t j = 0; j < period; ++j) {
            x += z;
            z = pt * z;
        }
        x /= static_cast<double>(period);
        x /= x.sum();
        residual = (pt * x - x).lpNorm<1>();
        if (residual <= tol.solver_tol)
            return x;
        y = z / z.sum();
    }
    throw InvariantViolation("stationary convergence", "power iteration did not converge in " +
                                                           std::to_string(tol.max_iters) +
                                                           " iterations, residual " + std::to_string(residual));
}

} // namespace

Eigen::VectorXd stationary_distribution(const StochasticMatrix &p, const IndexSet &cls, const Tolerances &tol) {
    if (cls.empty())
        throw ValidationError("stationary_distribution: empty class");
    IndexSet sorted = cls;
    std::sort(sorted.begin(), sorted.end());
    const auto c = static_cast<Eigen::Index>(sorted.size());
    Eigen::MatrixXd block(c, c);
    for (Eigen::Index a = 0; a < c; ++a)
        for (Eigen::Index b = 0; b < c; ++b)
            block(a, b) = p(sorted[a], sorted[b]);

    Eigen::VectorXd local;
    if (sorted.size() <= tol.dense_cutoff) {
        local = stationary_direct(block);
    } else {
        const auto period = period_of_class(p, sorted, tol);
        local = stationary_power(block, period, tol);
    }
    for (Eigen::Index a = 0; a < c; ++a)
        if (local(a) < 0.0 && local(a) > -tol.solver_tol)
            local(a) = 0.0;
    local /= local.sum();
    Eigen::VectorXd x = embed(local, sorted, p.size());
    const double residual = fixed_point_residual(p, x);
    if (residual > tol.solver_tol || local.minCoeff() < 0.0)
        throw InvariantViolation("stationary fixed point", "residual " + std::to_string(residual) + " on class at " +
                                                               std::to_string(sorted.front()));
    return x;
}

ChainDecomposition decompose(const StochasticMatrix &p, const Tolerances &tol) {
    auto d = classify_states(p, tol);
    for (auto &c : d.classes) {
        c.period = period_of_class(p, c.states, tol);
        c.subclasses = cyclic_subclasses(p, c.states, c.period, tol);
        c.stationary = stationary_distribution(p, c.states, tol);
    }
    return d;
}

StationaryDistribution mix_stationary(const StochasticMatrix &p, const ChainDecomposition &d,
                                      const std::vector<double> &alpha, const Tolerances &tol) {
    std::vector<double> coeffs;
    if (alpha.size() == d.classes.size()) {
        coeffs = alpha;
    } else if (alpha.size() == d.communication.size()) {
        for (std::size_t c = 0; c < alpha.size(); ++c) {
            if (d.recurrent_id[c] < 0) {
                if (alpha[c] != 0.0)
                    throw ValidationError("mixture weight " + std::to_string(alpha[c]) +
                                          " on transient class containing state " +
                                          std::to_string(d.communication[c].front()));
            } else {
                coeffs.push_back(alpha[c]);
            }
        }
    } else {
        throw ValidationError("mixture has " + std::to_string(alpha.size()) + " coefficients, chain has " +
                              std::to_string(d.classes.size()) + " recurrent classes");
    }
    double total = 0.0;
    for (std::size_t l = 0; l < coeffs.size(); ++l) {
        if (!(coeffs[l] >= 0.0))
            throw ValidationError("mixture coefficient " + std::to_string(l) + " is negative");
        total += coeffs[l];
    }
    if (std::abs(total - 1.0) > tol.stochastic_tol)
        throw ValidationError("mixture coefficients sum to " + std::to_string(total) + ", expected 1");

    StationaryDistribution s{p.alphabet(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.size())), coeffs};
    for (std::size_t l = 0; l < coeffs.size(); ++l) {
        if (d.classes[l].stationary.size() == 0)
            throw ValidationError("mix_stationary: decomposition lacks stationary vectors");
        s.weights += coeffs[l] * d.classes[l].stationary;
    }
    return s;
}

Eigen::VectorXd evolve(const StochasticMatrix &p, const Eigen::VectorXd &dist, std::size_t n) {
    if (dist.size() != static_cast<Eigen::Index>(p.size()))
        throw ValidationError("evolve: distribution length does not match alphabet");
    Eigen::RowVectorXd x = dist.transpose();
    for (std::size_t s = 0; s < n; ++s)
        x = x * p.entries();
    return x.transpose();
}

double fixed_point_residual(const StochasticMatrix &p, const Eigen::VectorXd &x) {
    return (x.transpose() * p.entries() - x.transpose()).lpNorm<1>();
}

} // namespace emc
