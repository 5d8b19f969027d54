#include "emc/cli_reports.hpp"

#include "emc/errors.hpp"
#include "emc/random.hpp"
#include "emc/selftest.hpp"
#include "emc/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace emc {

namespace fs = std::filesystem;

Command parse_command(const std::string &name) {
    if (name == "classify")
        return Command::classify;
    if (name == "density")
        return Command::density;
    if (name == "correlate")
        return Command::correlate;
    if (name == "cluster")
        return Command::cluster;
    if (name == "groupwalk")
        return Command::groupwalk;
    if (name == "selftest")
        return Command::selftest;
    throw ValidationError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
    switch (c) {
    case Command::classify: return "classify";
    case Command::density: return "density";
    case Command::correlate: return "correlate";
    case Command::cluster: return "cluster";
    case Command::groupwalk: return "groupwalk";
    case Command::selftest: return "selftest";
    }
    return "?";
}

const std::vector<std::string> &setting_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k{"input", "group", "phases", "alpha", "k", "gap-max", "out",
                                   "seed", "word", "obs-a", "obs-b", "inject"};
        for (const auto &t : Tolerances::names())
            k.push_back("tol." + t);
        return k;
    }();
    return keys;
}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool known_key(const std::string &key) {
    for (const auto &k : setting_keys())
        if (k == key)
            return true;
    return false;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// File contents when `source` names a file, otherwise the text itself.
std::string file_or_inline(const std::string &source) {
    std::error_code ec;
    return fs::is_regular_file(source, ec) ? read_file(source) : source;
}

std::size_t parse_size(const std::string &key, const std::string &v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument("negative");
        const auto x = std::stoull(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return static_cast<std::size_t>(x);
    } catch (const std::exception &) {
        throw ValidationError(key + ": expected a nonnegative integer, got '" + v + "'");
    }
}

std::vector<double> parse_alpha(const std::string &v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size())
                throw std::invalid_argument("trailing");
        } catch (const std::exception &) {
            throw ValidationError("alpha: cannot parse '" + item + "'");
        }
    }
    return out;
}

} // namespace

std::map<std::string, std::string> read_config_file(const std::string &path) {
    std::map<std::string, std::string> out;
    std::stringstream ss(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0)
            key.erase(0, 2);
        if (!known_key(key))
            throw ValidationError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

RunConfig RunConfig::resolve(Command command, const std::map<std::string, std::string> &file,
                             const std::map<std::string, std::string> &flags) {
    RunConfig c;
    c.command = command;
    c.settings = file;
    for (const auto &[k, v] : flags)
        c.settings[k] = v;
    for (const auto &[key, v] : c.settings) {
        if (!known_key(key))
            throw ValidationError("unknown setting '" + key + "'");
        if (key == "input")
            c.input = v;
        else if (key == "group")
            c.group = v;
        else if (key == "phases")
            c.phases = v;
        else if (key == "alpha")
            c.alpha = parse_alpha(v);
        else if (key == "k")
            c.k = parse_size(key, v);
        else if (key == "gap-max")
            c.gap_max = parse_size(key, v);
        else if (key == "out")
            c.out = v;
        else if (key == "seed")
            c.seed = parse_size(key, v);
        else if (key == "word")
            c.word = v;
        else if (key == "obs-a")
            c.obs_a = v;
        else if (key == "obs-b")
            c.obs_b = v;
        else if (key == "inject")
            c.inject = v;
        else
            c.tol.set(key.substr(4), v);
    }
    if (c.k == 0)
        throw ValidationError("k must be at least 1");
    if (c.gap_max == 0 || c.gap_max > c.tol.curve_cutoff)
        throw ValidationError("gap-max must be in 1.." + std::to_string(c.tol.curve_cutoff));
    if (!c.inject.empty() && c.inject != "sqrt_cache" && c.inject != "phase_modulus")
        throw ValidationError("inject: expected sqrt_cache or phase_modulus, got '" + c.inject + "'");
    const bool needs_chain = command != Command::selftest && command != Command::groupwalk;
    if (needs_chain && c.input.empty() && c.group.empty())
        throw ValidationError(command_name(command) + " needs --input or --group");
    if (command == Command::groupwalk && c.group.empty())
        throw ValidationError("groupwalk needs --group");
    if (command == Command::correlate && c.word.empty())
        throw ValidationError("correlate needs --word");
    return c;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&h](const std::string &s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    feed(command_name(command));
    for (const auto &[k, v] : settings) {
        if (k == "out")
            continue;
        feed(k);
        feed(k == "input" || k == "group" || k == "phases" ? file_or_inline(v) : v);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// ------------------------------------------------------------------ output

void write_atomic(const fs::path &dir, const std::string &name, const std::string &content) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const fs::path target = dir / name;
    const fs::path tmp = dir / ("." + name + ".tmp");
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o)
            throw ValidationError("cannot write '" + tmp.string() + "'");
        o << content;
        if (!o)
            throw ValidationError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target, ec);
    if (ec)
        throw ValidationError("cannot rename to '" + target.string() + "': " + ec.message());
}

void write_json(const RunConfig &c, const std::string &name, const Json &j) { write_atomic(c.out, name, j.dump(2) + "\n"); }

Json tolerances_json(const Tolerances &tol) {
    Json j;
    for (const auto &n : Tolerances::names()) {
        const double v = tol.get(n);
        if (n == "dense_cutoff" || n == "max_iters" || n == "block_cutoff" || n == "curve_cutoff")
            j[n] = static_cast<std::uint64_t>(v);
        else
            j[n] = v;
    }
    return j;
}

Json report_header(const RunConfig &c) {
    Json j;
    j["schema"] = "emc/1";
    j["command"] = command_name(c.command);
    j["config_hash"] = c.hash();
    j["seed"] = c.seed;
    j["tolerances"] = tolerances_json(c.tol);
    return j;
}

Json deficiency_json(const StochasticMatrix &p) {
    Json d = Json::array();
    for (std::size_t i = 0; i < p.size(); ++i)
        d.push_back(p.deficiency()(static_cast<Eigen::Index>(i)));
    return d;
}

// ------------------------------------------------------------------ inputs

StochasticMatrix load_chain(const RunConfig &c) {
    if (!c.input.empty())
        return load_matrix(c.input, c.tol);
    const auto g = group_from_json(file_or_inline(c.group));
    return walk_matrix(g.group, g.measure, g.side, c.tol);
}

PhaseMatrix load_phases(const RunConfig &c, std::size_t n) {
    if (c.phases.empty())
        return PhaseMatrix::ones(n);
    if (c.phases == "random")
        return PhaseMatrix::random(n, c.seed);
    return phases_from_json(file_or_inline(c.phases), n);
}

StationaryDistribution load_pi(const RunConfig &c, const StochasticMatrix &p, const ChainDecomposition &d) {
    std::vector<double> alpha = c.alpha;
    if (alpha.empty())
        alpha.assign(d.classes.size(), 1.0 / static_cast<double>(d.classes.size()));
    return mix_stationary(p, d, alpha, c.tol);
}

/// Site tokens: "1" identity, "e:i:j" matrix unit, "d:v0,v1,..." diagonal.
/// i and j are labels or indices.
CMatrix parse_site(const std::string &token, const StochasticMatrix &p) {
    const auto n = static_cast<Eigen::Index>(p.size());
    if (token == "1")
        return CMatrix::Identity(n, n);
    auto state = [&](const std::string &s) -> std::size_t {
        const auto &labels = p.alphabet().labels();
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == s)
                return i;
        const auto v = parse_size("observable '" + token + "'", s);
        if (v >= p.size())
            throw ValidationError("observable '" + token + "': state " + s + " out of range");
        return v;
    };
    if (token.rfind("e:", 0) == 0) {
        const auto colon = token.find(':', 2);
        if (colon == std::string::npos)
            throw ValidationError("observable '" + token + "': expected e:i:j");
        return matrix_unit(p.size(), state(token.substr(2, colon - 2)), state(token.substr(colon + 1)));
    }
    if (token.rfind("d:", 0) == 0) {
        const auto values = parse_alpha(token.substr(2));
        if (values.size() != p.size())
            throw ValidationError("observable '" + token + "': expected " + std::to_string(p.size()) + " values");
        CMatrix m = CMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            m(i, i) = values[static_cast<std::size_t>(i)];
        return m;
    }
    throw ValidationError("observable '" + token + "': expected 1, e:i:j or d:v0,v1,...");
}

ObservableWord parse_word(const std::string &text, const StochasticMatrix &p) {
    ObservableWord w;
    std::stringstream ss(text);
    std::string tok;
    while (ss >> tok)
        w.push_back(parse_site(tok, p));
    if (w.empty())
        throw ValidationError("word is empty");
    return w;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// ------------------------------------------------------------------ commands

void cmd_classify(const RunConfig &c, std::ostream &out) {
    const auto p = load_chain(c);
    const auto d = decompose(p, c.tol);
    Json j = report_header(c);
    j["n"] = p.size();
    j["labels"] = p.alphabet().labels();
    j["deficiencies"] = deficiency_json(p);
    j["decomposition"] = to_json(d);
    write_json(c, "classify.json", j);
    out << "classify: " << d.transient.size() << " transient, " << d.classes.size() << " recurrent class(es)\n";
}

void cmd_density(const RunConfig &c, std::ostream &out) {
    const auto p = load_chain(c);
    const auto d = decompose(p, c.tol);
    const auto pi = load_pi(c, p, d);
    const EntangledOperator op(p, load_phases(c, p.size()), c.tol);
    const auto q = op.quantum_measure(pi);
    const auto rec = density_block_recursive(op, q, c.k);
    const auto closed = density_block_closed(op, q, c.k);
    const double residual = (rec.matrix - closed.matrix).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-10))
        throw InvariantViolation("route equivalence", "recursive and closed density blocks differ by " +
                                                          format_double(residual));
    const auto diag = spectral_diagnostics(rec, c.tol.rank_tol);
    Json j = report_header(c);
    j["deficiencies"] = deficiency_json(p);
    j["route_residual"] = residual;
    j["pure"] = diag.rank == 1 && std::abs(diag.entropy) <= 1e-10;
    j["block"] = to_json(rec, diag);
    write_json(c, "density.json", j);
    write_atomic(c.out, "marginals.csv", marginals_csv(rec));
    out << "density: k=" << c.k << " trace=" << format_double(rec.trace) << " rank=" << diag.rank
        << " entropy=" << format_double(diag.entropy) << '\n';
}

void cmd_correlate(const RunConfig &c, std::ostream &out) {
    const auto p = load_chain(c);
    const auto d = decompose(p, c.tol);
    const auto pi = load_pi(c, p, d);
    const EntangledOperator op(p, load_phases(c, p.size()), c.tol);
    const auto q = op.quantum_measure(pi);
    const auto word = parse_word(c.word, p);
    const Complex value = finite_correlation(op, q, word);
    const auto a = parse_site(c.obs_a, p), b = parse_site(c.obs_b, p);
    const auto curve = shift_correlation_curve(op, q, a, b, c.gap_max);
    Json j = report_header(c);
    j["deficiencies"] = deficiency_json(p);
    j["word"] = c.word;
    j["value"] = complex_json(value);
    j["obs_a"] = c.obs_a;
    j["obs_b"] = c.obs_b;
    Json shift = Json::array();
    for (std::size_t g = 0; g < curve.size(); ++g)
        shift.push_back(Json::array({g, curve[g].real(), curve[g].imag()}));
    j["shift"] = std::move(shift);
    write_json(c, "correlate.json", j);
    out << "correlate: " << format_double(value.real()) << (value.imag() < 0 ? "" : "+")
        << format_double(value.imag()) << "i\n";
}

void cmd_cluster(const RunConfig &c, std::ostream &out) {
    const auto p = load_chain(c);
    const auto d = decompose(p, c.tol);
    const auto pi = load_pi(c, p, d);
    const EntangledOperator op(p, load_phases(c, p.size()), c.tol);
    const auto q = op.quantum_measure(pi);
    const auto a = parse_site(c.obs_a, p), b = parse_site(c.obs_b, p);
    const auto evidence = curve_evidence(op, q, d, pi, a, b, c.gap_max);
    const auto v = verdict(d, pi, {evidence}, c.tol);
    Json j = report_header(c);
    j["deficiencies"] = deficiency_json(p);
    j["obs_a"] = c.obs_a;
    j["obs_b"] = c.obs_b;
    j["gap_max"] = c.gap_max;
    j["verdict"] = to_json(v);
    write_json(c, "verdict.json", j);
    write_atomic(c.out, "curve.csv", curve_csv(evidence.curve));
    out << "cluster: ergodic=" << (v.ergodic ? "true" : "false")
        << " strongly_clustering=" << (v.strongly_clustering ? "true" : "false") << '\n';
}

void cmd_groupwalk(const RunConfig &c, std::ostream &out) {
    const auto in = group_from_json(file_or_inline(c.group));
    const auto p = walk_matrix(in.group, in.measure, in.side, c.tol);
    Json j = report_header(c);
    j["group"] = in.group.describe();
    j["size"] = in.group.size();
    j["exact"] = in.group.exact();
    j["side"] = in.side == WalkSide::right ? "right" : "left";
    j["deficiencies"] = deficiency_json(p);
    if (in.group.exact()) {
        j["double_stochastic"] = double_stochastic_check(p);
        j["axiom_failures"] = group_axiom_failures(in.group, c.seed, 100);
        Rng rng(c.seed);
        std::vector<CMatrix> samples;
        const auto n = static_cast<Eigen::Index>(in.group.size());
        for (int t = 0; t < 20; ++t) {
            CMatrix a(n, n);
            for (Eigen::Index r = 0; r < n; ++r)
                for (Eigen::Index s = 0; s < n; ++s)
                    a(r, s) = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
            samples.push_back(a);
        }
        double matched = 0.0, mismatched = 0.0;
        for (std::size_t g = 0; g < in.group.size(); ++g) {
            matched = std::max(matched, equivariance_residual(in.group, in.measure, in.side, g, samples));
            mismatched = std::max(mismatched, equivariance_residual(in.group, in.measure, in.side, g, samples,
                                                                    Pairing::mismatched));
        }
        j["equivariance_residual"] = matched;
        j["mismatched_residual"] = mismatched;
        if (!(matched <= 1e-10))
            throw InvariantViolation("walk equivariance", "residual " + format_double(matched));
    }
    write_json(c, "walk.json", to_json(p));
    write_json(c, "groupwalk.json", j);
    out << "groupwalk: " << in.group.describe() << ", " << p.size() << " elements\n";
}

int cmd_selftest(const RunConfig &c, std::ostream &out, std::ostream &err) {
    SelftestOptions o;
    o.seed = c.seed;
    o.tol = c.tol;
    o.corrupt_sqrt_cache = c.inject == "sqrt_cache";
    o.corrupt_phase = c.inject == "phase_modulus";
    const auto r = run_selftest(o, out);
    if (r.passed) {
        out << "selftest: " << r.checks << " invariants passed\n";
        return 0;
    }
    err << "invariant violated: " << r.failed_invariant << " (residual " << format_double(r.residual)
        << " > " << format_double(r.threshold) << ")\n";
    return 3;
}

} // namespace

int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
    try {
        switch (config.command) {
        case Command::classify: cmd_classify(config, out); break;
        case Command::density: cmd_density(config, out); break;
        case Command::correlate: cmd_correlate(config, out); break;
        case Command::cluster: cmd_cluster(config, out); break;
        case Command::groupwalk: cmd_groupwalk(config, out); break;
        case Command::selftest: return cmd_selftest(config, out, err);
        }
        return 0;
    } catch (const InvariantViolation &e) {
        err << "invariant violated: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError &e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception &e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    }
}

} // namespace emc
