#include "emc/serialization.hpp"

#include "emc/errors.hpp"

#include <cstdio>
#include <sstream>

namespace emc {

Json to_json(const StochasticMatrix &p) {
    Json j;
    j["n"] = p.size();
    j["labels"] = p.alphabet().labels();
    Json entries = Json::array();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t k = 0; k < p.size(); ++k)
            if (p(i, k) != 0.0)
                entries.push_back(Json::array({i, k, p(i, k)}));
    j["entries"] = std::move(entries);
    return j;
}

Json complex_matrix_json(const CMatrix &m, const Alphabet &alphabet) {
    Json j;
    j["n"] = m.rows();
    j["labels"] = alphabet.labels();
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (m(r, c) != Complex{})
                entries.push_back(Json::array({r, c, Json::array({m(r, c).real(), m(r, c).imag()})}));
    j["entries"] = std::move(entries);
    return j;
}

Json to_json(const ChainDecomposition &d) {
    Json j;
    j["transient"] = d.transient;
    Json classes = Json::array();
    for (const auto &c : d.classes) {
        Json cj;
        cj["indices"] = c.states;
        cj["period"] = c.period;
        cj["subclasses"] = c.subclasses;
        Json st = Json::array();
        for (auto i : c.states)
            st.push_back(c.stationary.size() ? c.stationary(static_cast<Eigen::Index>(i)) : 0.0);
        cj["stationary"] = std::move(st);
        classes.push_back(std::move(cj));
    }
    j["classes"] = std::move(classes);
    return j;
}

Json to_json(const DensityBlock &b, const SpectralDiagnostics &diag) {
    Json j;
    j["k"] = b.k;
    j["labels"] = b.alphabet.labels();
    const auto n = b.alphabet.size();
    Json entries = Json::array();
    for (std::size_t r = 0; r < b.dim(); ++r)
        for (std::size_t c = 0; c < b.dim(); ++c) {
            const Complex v = b.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (v != Complex{})
                entries.push_back(Json::array({decode_tuple(r, n, b.k), decode_tuple(c, n, b.k), v.real(), v.imag()}));
        }
    j["entries"] = std::move(entries);
    j["trace"] = b.trace;
    j["eigenvalues"] = diag.eigenvalues;
    j["rank"] = diag.rank;
    j["entropy"] = diag.entropy;
    return j;
}

Json to_json(const ClusterVerdict &v) {
    Json j;
    j["ergodic"] = v.ergodic;
    j["strongly_clustering"] = v.strongly_clustering;
    Json classes = Json::array();
    for (std::size_t i = 0; i < v.support.size(); ++i)
        classes.push_back(Json{{"id", v.support[i]}, {"weight", v.weights[i]}, {"period", v.periods[i]}});
    j["classes"] = std::move(classes);
    Json res = Json::object();
    auto put = [&res](const char *key, const std::optional<double> &x) {
        if (x)
            res[key] = *x;
    };
    put("raw", v.raw_residual);
    put("cesaro", v.cesaro_residual);
    put("cesaro_vs_limit", v.cesaro_vs_limit);
    put("class_variance", v.class_variance);
    j["residuals"] = std::move(res);
    j["fitted_rate"] = v.fitted_rate ? Json(*v.fitted_rate) : Json(nullptr);
    return j;
}

PhaseMatrix phases_from_json(const std::string &text, std::size_t n) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ValidationError(std::string("phase JSON: ") + e.what());
    }
    try {
        if (j.is_object()) {
            if (!j.contains("seed"))
                throw ValidationError("phase JSON object must contain \"seed\"");
            return PhaseMatrix::random(n, j.at("seed").get<std::uint64_t>());
        }
        if (!j.is_array() || j.size() != n)
            throw ValidationError("phase JSON must be an " + std::to_string(n) + "x" + std::to_string(n) + " array");
        CMatrix chi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) {
            if (!j[r].is_array() || j[r].size() != n)
                throw ValidationError("phase JSON row " + std::to_string(r) + " has wrong length");
            for (std::size_t c = 0; c < n; ++c) {
                const auto &e = j[r][c];
                if (!e.is_array() || e.size() != 2)
                    throw ValidationError("phase JSON entry (" + std::to_string(r) + "," + std::to_string(c) +
                                          ") is not [re, im]");
                chi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    Complex(e[0].get<double>(), e[1].get<double>());
            }
        }
        return PhaseMatrix::from_matrix(std::move(chi));
    } catch (const Json::exception &e) {
        throw ValidationError(std::string("phase JSON: ") + e.what());
    }
}

GroupWalkInput group_from_json(const std::string &text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ValidationError(std::string("group JSON: ") + e.what());
    }
    try {
        const auto kind = j.at("kind").get<std::string>();
        const Json params = j.value("params", Json::object());
        auto param = [&](const char *name) {
            if (!params.contains(name))
                throw ValidationError("group JSON: " + kind + " needs params." + name);
            return params.at(name).get<std::size_t>();
        };
        std::optional<GroupSpec> g;
        if (kind == "cyclic")
            g = GroupSpec::cyclic(param("n"));
        else if (kind == "dihedral")
            g = GroupSpec::dihedral(param("n"));
        else if (kind == "free")
            g = GroupSpec::free(param("rank"), param("radius"));
        else if (kind == "lattice")
            g = GroupSpec::lattice(param("d"), param("window"));
        else if (kind == "table")
            g = GroupSpec::from_table(params.at("table").get<std::vector<std::vector<std::size_t>>>(),
                                      params.value("labels", std::vector<std::string>{}));
        else
            throw ValidationError("group JSON: unknown kind '" + kind + "'");

        GroupWalkInput in{*g, GroupMeasure{}, WalkSide::right};
        if (j.contains("measure")) {
            std::vector<std::pair<std::string, double>> words;
            for (const auto &e : j.at("measure")) {
                if (!e.is_array() || e.size() != 2)
                    throw ValidationError("group JSON: measure entries must be [word, weight]");
                words.emplace_back(e[0].get<std::string>(), e[1].get<double>());
            }
            in.measure = GroupMeasure::from_words(in.group, words);
        } else if (j.contains("generators")) {
            const auto gens = j.at("generators").get<std::vector<std::string>>();
            std::vector<std::pair<std::string, double>> words;
            for (const auto &w : gens)
                words.emplace_back(w, 1.0 / static_cast<double>(gens.size()));
            in.measure = GroupMeasure::from_words(in.group, words);
        } else {
            in.measure = GroupMeasure::uniform_on_generators(in.group);
        }
        const auto side = j.value("side", std::string("right"));
        if (side == "right")
            in.side = WalkSide::right;
        else if (side == "left")
            in.side = WalkSide::left;
        else
            throw ValidationError("group JSON: side must be \"right\" or \"left\"");
        return in;
    } catch (const Json::exception &e) {
        throw ValidationError(std::string("group JSON: ") + e.what());
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string curve_csv(const CesaroCurve &c) {
    std::ostringstream os;
    os << "n,raw_re,raw_im,cesaro_re,cesaro_im\n";
    for (std::size_t k = 0; k < c.raw.size(); ++k)
        os << (k + 1) << ',' << format_double(c.raw[k].real()) << ',' << format_double(c.raw[k].imag()) << ','
           << format_double(c.cesaro[k].real()) << ',' << format_double(c.cesaro[k].imag()) << '\n';
    return os.str();
}

std::string marginals_csv(const DensityBlock &b) {
    std::ostringstream os;
    os << "tuple,probability\n";
    const auto n = b.alphabet.size();
    for (std::size_t r = 0; r < b.dim(); ++r) {
        const auto t = decode_tuple(r, n, b.k);
        for (std::size_t m = 0; m < t.size(); ++m)
            os << (m ? " " : "") << b.alphabet.label(t[m]);
        os << ',' << format_double(b.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)).real())
           << '\n';
    }
    return os.str();
}

} // namespace emc
