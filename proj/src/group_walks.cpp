#include "emc/group_walks.hpp"

#include "emc/entangled_core.hpp"
#include "emc/errors.hpp"
#include "emc/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>

namespace emc {

namespace {

std::string inverse_letter(const std::string &letter) {
    std::string s = letter;
    for (auto &ch : s)
        ch = static_cast<char>(std::isupper(static_cast<unsigned char>(ch)) ? std::tolower(ch) : std::toupper(ch));
    return s;
}

} // namespace

GroupSpec GroupSpec::enumerate(GroupKind kind, Model model, bool exact, std::string description) {
    GroupSpec g;
    g.kind_ = kind;
    g.exact_ = exact;
    g.description_ = std::move(description);

    std::map<GroupKey, std::size_t> seen;
    std::vector<std::string> labels{"e"};
    g.keys_.push_back(model.identity);
    seen.emplace(model.identity, 0);
    for (std::size_t head = 0; head < g.keys_.size(); ++head) {
        for (const auto &[letter, gen] : model.generators) {
            GroupKey next = model.mult(g.keys_[head], gen);
            if (!model.in_window(next) || seen.count(next))
                continue;
            seen.emplace(next, g.keys_.size());
            g.keys_.push_back(next);
            labels.push_back(head == 0 ? letter : labels[head] + letter);
        }
    }
    for (const auto &[letter, gen] : model.generators)
        g.letters_.push_back(letter);
    g.alphabet_ = Alphabet(std::move(labels));
    g.model_ = std::move(model);
    return g;
}

GroupSpec GroupSpec::cyclic(std::size_t n) {
    if (n == 0)
        throw ValidationError("cyclic group order must be positive");
    const int m = static_cast<int>(n);
    Model model;
    model.identity = {0};
    model.mult = [m](const GroupKey &a, const GroupKey &b) { return GroupKey{(a[0] + b[0]) % m}; };
    model.inv = [m](const GroupKey &a) { return GroupKey{(m - a[0]) % m}; };
    model.in_window = [](const GroupKey &) { return true; };
    model.generators = {{"r", {1 % m}}, {"R", {(m - 1) % m}}};
    return enumerate(GroupKind::cyclic, std::move(model), true, "cyclic(" + std::to_string(n) + ")");
}

GroupSpec GroupSpec::dihedral(std::size_t n) {
    if (n < 1)
        throw ValidationError("dihedral group parameter must be positive");
    const int m = static_cast<int>(n);
    // (k, f) = r^k s^f; s r = r^{-1} s.
    Model model;
    model.identity = {0, 0};
    model.mult = [m](const GroupKey &a, const GroupKey &b) {
        const int k = a[1] ? a[0] - b[0] : a[0] + b[0];
        return GroupKey{((k % m) + m) % m, a[1] ^ b[1]};
    };
    model.inv = [m](const GroupKey &a) { return a[1] ? a : GroupKey{(m - a[0]) % m, 0}; };
    model.in_window = [](const GroupKey &) { return true; };
    model.generators = {{"r", {1 % m, 0}}, {"R", {(m - 1) % m, 0}}, {"s", {0, 1}}};
    return enumerate(GroupKind::dihedral, std::move(model), true, "dihedral(" + std::to_string(n) + ")");
}

GroupSpec GroupSpec::free(std::size_t rank, std::size_t radius) {
    if (rank == 0 || rank > 26)
        throw ValidationError("free group rank must be in 1..26");
    // Reduced words; letter 2g is generator g, 2g+1 its inverse.
    Model model;
    model.identity = {};
    model.mult = [](const GroupKey &a, const GroupKey &b) {
        GroupKey out = a;
        for (int x : b) {
            if (!out.empty() && (out.back() ^ 1) == x)
                out.pop_back();
            else
                out.push_back(x);
        }
        return out;
    };
    model.inv = [](const GroupKey &a) {
        GroupKey out(a.rbegin(), a.rend());
        for (auto &x : out)
            x ^= 1;
        return out;
    };
    model.in_window = [radius](const GroupKey &a) { return a.size() <= radius; };
    for (std::size_t g = 0; g < rank; ++g) {
        const std::string letter(1, static_cast<char>('a' + g));
        model.generators.push_back({letter, {static_cast<int>(2 * g)}});
        model.generators.push_back({inverse_letter(letter), {static_cast<int>(2 * g + 1)}});
    }
    return enumerate(GroupKind::free, std::move(model), false,
                     "free(" + std::to_string(rank) + ", radius " + std::to_string(radius) + ")");
}

GroupSpec GroupSpec::lattice(std::size_t dim, std::size_t window) {
    if (dim == 0 || dim > 4)
        throw ValidationError("lattice dimension must be in 1..4");
    static const char *letters = "xyzw";
    const int w = static_cast<int>(window);
    Model model;
    model.identity = GroupKey(dim, 0);
    model.mult = [](const GroupKey &a, const GroupKey &b) {
        GroupKey out = a;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += b[i];
        return out;
    };
    model.inv = [](const GroupKey &a) {
        GroupKey out = a;
        for (auto &x : out)
            x = -x;
        return out;
    };
    model.in_window = [w](const GroupKey &a) {
        return std::all_of(a.begin(), a.end(), [w](int x) { return std::abs(x) <= w; });
    };
    for (std::size_t i = 0; i < dim; ++i) {
        GroupKey up(dim, 0), down(dim, 0);
        up[i] = 1;
        down[i] = -1;
        const std::string letter(1, letters[i]);
        model.generators.push_back({letter, up});
        model.generators.push_back({inverse_letter(letter), down});
    }
    return enumerate(GroupKind::lattice, std::move(model), false,
                     "lattice(" + std::to_string(dim) + ", window " + std::to_string(window) + ")");
}

GroupSpec GroupSpec::from_table(std::vector<std::vector<std::size_t>> table, std::vector<std::string> labels) {
    const auto n = table.size();
    if (n == 0)
        throw ValidationError("group table is empty");
    for (std::size_t i = 0; i < n; ++i) {
        if (table[i].size() != n)
            throw ValidationError("group table row " + std::to_string(i) + " has wrong length");
        for (std::size_t j = 0; j < n; ++j) {
            if (table[i][j] >= n)
                throw ValidationError("group table entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") out of range");
            if ((i == 0 && table[i][j] != j) || (j == 0 && table[i][j] != i))
                throw ValidationError("group table: element 0 is not the identity");
        }
    }
    std::vector<std::size_t> inverse(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (table[i][j] == 0 && table[j][i] == 0)
                inverse[i] = j;
    for (std::size_t i = 0; i < n; ++i)
        if (inverse[i] == n)
            throw ValidationError("group table: element " + std::to_string(i) + " has no inverse");
    if (labels.empty()) {
        labels.push_back("e");
        for (std::size_t i = 1; i < n; ++i)
            labels.push_back("g" + std::to_string(i));
    }
    if (labels.size() != n)
        throw ValidationError("group table: label count does not match table size");

    auto shared = std::make_shared<std::vector<std::vector<std::size_t>>>(std::move(table));
    GroupSpec g;
    g.kind_ = GroupKind::table;
    g.exact_ = true;
    g.alphabet_ = Alphabet(std::move(labels));
    for (std::size_t i = 0; i < n; ++i)
        g.keys_.push_back({static_cast<int>(i)});
    g.model_.identity = {0};
    g.model_.mult = [shared](const GroupKey &a, const GroupKey &b) {
        return GroupKey{static_cast<int>((*shared)[static_cast<std::size_t>(a[0])][static_cast<std::size_t>(b[0])])};
    };
    g.model_.inv = [inverse](const GroupKey &a) {
        return GroupKey{static_cast<int>(inverse[static_cast<std::size_t>(a[0])])};
    };
    g.model_.in_window = [](const GroupKey &) { return true; };
    g.description_ = "table(" + std::to_string(n) + ")";
    return g;
}

std::optional<std::size_t> GroupSpec::find(const GroupKey &key) const {
    if (kind_ == GroupKind::table)
        return static_cast<std::size_t>(key[0]);
    if (!model_.in_window(key))
        return std::nullopt;
    // Enumeration is small; linear lookup keeps the group copyable without an index.
    auto it = std::find(keys_.begin(), keys_.end(), key);
    if (it == keys_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - keys_.begin());
}

std::optional<std::size_t> GroupSpec::multiply(std::size_t g, std::size_t h) const {
    return find(model_.mult(keys_.at(g), keys_.at(h)));
}

std::optional<std::size_t> GroupSpec::inverse(std::size_t g) const { return find(model_.inv(keys_.at(g))); }

std::size_t GroupSpec::element(std::string_view word) const {
    const auto &labels = alphabet_.labels();
    if (auto it = std::find(labels.begin(), labels.end(), word); it != labels.end())
        return static_cast<std::size_t>(it - labels.begin());
    if (kind_ == GroupKind::table)
        throw ValidationError("unknown group element '" + std::string(word) + "'");
    GroupKey key = model_.identity;
    for (char ch : word) {
        const std::string letter(1, ch);
        auto it = std::find_if(model_.generators.begin(), model_.generators.end(),
                               [&](const auto &gl) { return gl.first == letter; });
        if (it == model_.generators.end()) {
            // Involutive generators (dihedral s) have no separate inverse letter.
            it = std::find_if(model_.generators.begin(), model_.generators.end(),
                              [&](const auto &gl) { return gl.first == inverse_letter(letter); });
            if (it == model_.generators.end())
                throw ValidationError("word '" + std::string(word) + "': unknown generator '" + letter + "'");
            key = model_.mult(key, model_.inv(it->second));
        } else {
            key = model_.mult(key, it->second);
        }
    }
    auto idx = find(key);
    if (!idx)
        throw ValidationError("word '" + std::string(word) + "' lies outside the enumerated window of " +
                              description_);
    return *idx;
}

std::string GroupSpec::describe() const { return description_; }

// ------------------------------------------------------------ GroupMeasure

GroupMeasure GroupMeasure::from_words(const GroupSpec &g, const std::vector<std::pair<std::string, double>> &words) {
    std::map<std::size_t, double> acc;
    double total = 0.0;
    for (const auto &[word, w] : words) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ValidationError("measure weight for '" + word + "' must be finite and nonnegative");
        acc[g.element(word)] += w;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("measure weights sum to " + std::to_string(total) + ", expected 1");
    GroupMeasure mu;
    for (const auto &[e, w] : acc)
        if (w > 0.0)
            mu.weights.emplace_back(e, w);
    return mu;
}

GroupMeasure GroupMeasure::uniform_on_generators(const GroupSpec &g) {
    std::vector<std::pair<std::string, double>> words;
    std::vector<std::size_t> seen;
    for (const auto &letter : g.generator_letters()) {
        const auto e = g.element(letter);
        if (std::find(seen.begin(), seen.end(), e) == seen.end())
            seen.push_back(e);
    }
    GroupMeasure mu;
    for (auto e : seen)
        mu.weights.emplace_back(e, 1.0 / static_cast<double>(seen.size()));
    std::sort(mu.weights.begin(), mu.weights.end());
    return mu;
}

GroupMeasure GroupMeasure::dirac(std::size_t element) { return GroupMeasure{{{element, 1.0}}}; }

GroupMeasure GroupMeasure::seeded(const GroupSpec &g, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> support;
    if (g.exact()) {
        for (std::size_t e = 0; e < g.size(); ++e)
            support.push_back(e);
    } else {
        support.push_back(GroupSpec::identity());
        for (const auto &letter : g.generator_letters())
            support.push_back(g.element(letter));
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
    }
    GroupMeasure mu;
    double total = 0.0;
    for (auto e : support) {
        const double w = 0.05 + uniform01(rng);
        mu.weights.emplace_back(e, w);
        total += w;
    }
    for (auto &[e, w] : mu.weights)
        w /= total;
    return mu;
}

double GroupMeasure::at(std::size_t element) const {
    for (const auto &[e, w] : weights)
        if (e == element)
            return w;
    return 0.0;
}

// ------------------------------------------------------------------- walks

StochasticMatrix walk_matrix(const GroupSpec &g, const GroupMeasure &mu, WalkSide side, const Tolerances &tol) {
    const auto n = g.size();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto &[s, w] : mu.weights) {
        if (s >= n)
            throw ValidationError("measure support outside the enumerated elements");
        std::optional<std::size_t> s_inv;
        if (side == WalkSide::left) {
            s_inv = g.inverse(s);
            if (!s_inv)
                throw ValidationError("measure support element has no enumerated inverse");
        }
        for (std::size_t x = 0; x < n; ++x) {
            // right: h = x s, so x^{-1} h = s; left: h = s^{-1} x, so x h^{-1} = s.
            const auto h = side == WalkSide::right ? g.multiply(x, s) : g.multiply(*s_inv, x);
            if (h)
                p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(*h)) += w;
        }
    }
    return StochasticMatrix(g.elements(), std::move(p), tol);
}

bool double_stochastic_check(const StochasticMatrix &p, double tol) {
    const auto &m = p.entries();
    return ((m.rowwise().sum().array() - 1.0).abs() <= tol).all() &&
           ((m.colwise().sum().array() - 1.0).abs() <= tol).all();
}

Eigen::MatrixXd translation_operator(const GroupSpec &g, std::size_t element, TranslationSide side) {
    if (!g.exact())
        throw ValidationError("translations are only defined on exact finite groups, not on " + g.describe());
    if (element >= g.size())
        throw ValidationError("translation_operator: unknown element");
    const auto n = g.size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto inv = *g.inverse(element);
    for (std::size_t y = 0; y < n; ++y) {
        const auto x = side == TranslationSide::left ? *g.multiply(element, y) : *g.multiply(y, inv);
        t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 1.0;
    }
    return t;
}

double equivariance_residual(const GroupSpec &g, const GroupMeasure &mu, WalkSide side, std::size_t element,
                             const std::vector<CMatrix> &samples, Pairing pairing) {
    const EntangledOperator op(walk_matrix(g, mu, side));
    const bool use_left = (side == WalkSide::right) == (pairing == Pairing::matched);
    const CMatrix t =
        translation_operator(g, element, use_left ? TranslationSide::left : TranslationSide::right).cast<Complex>();
    double worst = 0.0;
    for (const auto &a : samples) {
        const CMatrix lhs = t * op.apply(a) * t.adjoint();
        const CMatrix rhs = op.apply(t * a * t.adjoint());
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

std::size_t group_axiom_failures(const GroupSpec &g, std::uint64_t seed, std::size_t triples) {
    std::size_t failures = 0;
    const auto n = g.size();
    const auto e = GroupSpec::identity();
    for (std::size_t x = 0; x < n; ++x) {
        if (g.multiply(x, e) != x || g.multiply(e, x) != x)
            ++failures;
        const auto inv = g.inverse(x);
        if (!inv || g.multiply(x, *inv) != e || g.multiply(*inv, x) != e)
            ++failures;
    }
    Rng rng(seed);
    for (std::size_t t = 0; t < triples; ++t) {
        const auto a = uniform_index(rng, n), b = uniform_index(rng, n), c = uniform_index(rng, n);
        const auto ab = g.multiply(a, b), bc = g.multiply(b, c);
        if (!ab || !bc)
            continue;
        if (g.multiply(*ab, c) != g.multiply(a, *bc))
            ++failures;
    }
    return failures;
}

} // namespace emc
