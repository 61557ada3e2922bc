#include "coagstat/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace coag {

using nlohmann::json;

namespace {

const char* family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Constant: return "constant";
        case KernelFamily::FreeMolecular: return "free_molecular";
        case KernelFamily::Brownian: return "brownian";
        case KernelFamily::ProductPower: return "product_power";
        case KernelFamily::EnvelopePower: return "envelope_power";
        case KernelFamily::Tabulated: return "tabulated";
    }
    return "?";
}

KernelFamily family_from(const std::string& s) {
    for (KernelFamily f : {KernelFamily::Constant, KernelFamily::FreeMolecular,
                           KernelFamily::Brownian, KernelFamily::ProductPower,
                           KernelFamily::EnvelopePower, KernelFamily::Tabulated})
        if (s == family_name(f)) return f;
    throw ConfigError("unknown kernel family: " + s);
}

KernelSpec kernel_from_json(const json& j, std::vector<std::string>& errs) {
    KernelSpec spec;
    if (!j.contains("family")) {
        errs.push_back("kernel.family is required");
        return spec;
    }
    spec.family = family_from(j.at("family").get<std::string>());
    spec.c = j.value("c", 1.0);
    spec.gamma = j.value("gamma", 0.0);
    spec.lambda = j.value("lambda", 0.0);
    spec.p = j.value("p", 0.0);
    spec.rescale_exponent = j.value("rescale_p", 0.0);
    if (j.contains("volumes")) spec.volumes = j.at("volumes").get<std::vector<double>>();
    if (j.contains("table_norms"))
        spec.table_norms = j.at("table_norms").get<std::vector<double>>();
    if (j.contains("table_values")) {
        for (const auto& row : j.at("table_values"))
            for (const auto& v : row) spec.table_values.push_back(v.get<double>());
    }
    return spec;
}

json kernel_to_json(const KernelSpec& spec) {
    json j;
    j["family"] = family_name(spec.family);
    switch (spec.family) {
        case KernelFamily::Constant: j["c"] = spec.c; break;
        case KernelFamily::FreeMolecular:
        case KernelFamily::Brownian: j["volumes"] = spec.volumes; break;
        case KernelFamily::ProductPower:
            j["gamma"] = spec.gamma;
            j["lambda"] = spec.lambda;
            break;
        case KernelFamily::EnvelopePower:
            j["gamma"] = spec.gamma;
            j["p"] = spec.p;
            j["c"] = spec.c;
            break;
        case KernelFamily::Tabulated: {
            j["table_norms"] = spec.table_norms;
            std::size_t n = spec.table_norms.size();
            json rows = json::array();
            for (std::size_t i = 0; i < n; ++i) {
                json row = json::array();
                for (std::size_t k = 0; k < n; ++k) row.push_back(spec.table_values[i * n + k]);
                rows.push_back(row);
            }
            j["table_values"] = rows;
            break;
        }
    }
    if (spec.rescale_exponent != 0.0) j["rescale_p"] = spec.rescale_exponent;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }

    RunConfig cfg;
    std::vector<std::string> errs;
    try {
        cfg.dimension = j.value("dimension", 1);
        if (cfg.dimension < 1) errs.push_back("dimension must be >= 1");

        if (j.contains("kernel"))
            cfg.kernel = kernel_from_json(j.at("kernel"), errs);
        else
            errs.push_back("kernel section is required");
        for (const auto& e : cfg.kernel.validate(cfg.dimension)) errs.push_back("kernel: " + e);

        if (j.contains("source")) {
            for (const auto& entry : j.at("source")) {
                Composition alpha(entry.at("composition").get<std::vector<int>>());
                double rate = entry.at("rate").get<double>();
                if (alpha.dim() != cfg.dimension)
                    errs.push_back("source composition does not match the dimension");
                else if (!alpha.valid())
                    errs.push_back("source compositions must be non-negative with |alpha| >= 1");
                if (!std::isfinite(rate) || rate < 0)
                    errs.push_back("source rates must be finite and >= 0");
                cfg.source_entries.emplace_back(std::move(alpha), rate);
            }
        }

        double L = 1.0;
        for (const auto& [alpha, rate] : cfg.source_entries)
            if (rate > 0 && alpha.valid()) L = std::max(L, static_cast<double>(alpha.norm()));

        const json& tr = j.contains("truncation") ? j.at("truncation") : json::object();
        cfg.truncation.epsilon = tr.value("epsilon", 0.0);
        cfg.truncation.M = tr.value("M", 0.0);
        cfg.truncation.L = L;
        if (cfg.truncation.epsilon < 0) errs.push_back("truncation: epsilon must be >= 0");
        if (!(cfg.truncation.M > 0)) errs.push_back("truncation: cutoff scale M is required");
        else if (!(cfg.truncation.M > 2.0 * L)) {
            std::ostringstream os;
            os << "truncation: the cutoff must satisfy M > 2L (M=" << cfg.truncation.M
               << ", source reach L=" << L << ")";
            errs.push_back(os.str());
        }

        const json& so = j.contains("solver") ? j.at("solver") : json::object();
        SolverConfig& s = cfg.solver;
        s.dt_init = so.value("dt_init", s.dt_init);
        s.dt_max = so.value("dt_max", s.dt_max);
        s.safety = so.value("safety", s.safety);
        s.steady_tol = so.value("steady_tol", s.steady_tol);
        s.max_time = so.value("max_time", s.max_time);
        s.max_steps = so.value("max_steps", s.max_steps);
        s.err_rel = so.value("err_rel", s.err_rel);
        s.err_abs = so.value("err_abs", s.err_abs);
        if (!(s.dt_init > 0)) errs.push_back("solver: dt_init must be positive");
        if (!(s.dt_max > 0)) errs.push_back("solver: dt_max must be positive");
        if (!(s.safety > 0) || s.safety > 1) errs.push_back("solver: safety must be in (0,1]");
        if (!(s.steady_tol > 0) || s.steady_tol >= 1)
            errs.push_back("solver: steady_tol must be in (0,1)");
        if (!(s.max_time > 0)) errs.push_back("solver: max_time must be positive");
        if (s.max_steps < 1) errs.push_back("solver: max_steps must be >= 1");

        const json& out = j.contains("output") ? j.at("output") : json::object();
        cfg.output.directory = out.value("directory", cfg.output.directory);
        cfg.output.snapshot_interval = out.value("snapshot_interval", 0.0);

        const json& di = j.contains("diagnostics") ? j.at("diagnostics") : json::object();
        DiagnosticsConfig& dd = cfg.diagnostics;
        dd.window_b = di.value("window_b", dd.window_b);
        dd.band = di.value("band", dd.band);
        dd.eps_angle = di.value("eps_angle", dd.eps_angle);
        dd.tail_radius = di.value("tail_radius", dd.tail_radius);
        if (di.contains("radii")) dd.radii = di.at("radii").get<std::vector<double>>();
        if (di.contains("z_grid")) dd.z_grid = di.at("z_grid").get<std::vector<double>>();
        if (di.contains("localization_radii"))
            dd.localization_radii = di.at("localization_radii").get<std::vector<double>>();
        if (!(dd.window_b > 0) || !(dd.window_b < 1))
            errs.push_back("diagnostics: window_b must be in (0,1)");
        if (!(dd.band > 1)) errs.push_back("diagnostics: band must exceed 1");
        if (!(dd.eps_angle > 0)) errs.push_back("diagnostics: eps_angle must be positive");

        if (j.contains("sweep")) {
            cfg.sweep.present = true;
            cfg.sweep.eps_list = j.at("sweep").value("epsilon_list", std::vector<double>{});
            cfg.sweep.M_list = j.at("sweep").value("M_list", std::vector<double>{});
            if (cfg.sweep.eps_list.empty() || cfg.sweep.M_list.empty())
                errs.push_back("sweep: epsilon_list and M_list must be non-empty");
        }

        cfg.seed = j.value("seed", 0u);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }

    if (!errs.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string print_config(const RunConfig& cfg) {
    json j;
    j["dimension"] = cfg.dimension;
    j["kernel"] = kernel_to_json(cfg.kernel);
    json src = json::array();
    for (const auto& [alpha, rate] : cfg.source_entries)
        src.push_back({{"composition", alpha.parts}, {"rate", rate}});
    j["source"] = src;
    j["truncation"] = {{"epsilon", cfg.truncation.epsilon}, {"M", cfg.truncation.M}};
    j["solver"] = {{"dt_init", cfg.solver.dt_init},     {"dt_max", cfg.solver.dt_max},
                   {"safety", cfg.solver.safety},       {"steady_tol", cfg.solver.steady_tol},
                   {"max_time", cfg.solver.max_time},   {"max_steps", cfg.solver.max_steps},
                   {"err_rel", cfg.solver.err_rel},     {"err_abs", cfg.solver.err_abs}};
    j["output"] = {{"directory", cfg.output.directory},
                   {"snapshot_interval", cfg.output.snapshot_interval}};
    json di = {{"window_b", cfg.diagnostics.window_b},
               {"band", cfg.diagnostics.band},
               {"eps_angle", cfg.diagnostics.eps_angle},
               {"tail_radius", cfg.diagnostics.tail_radius}};
    if (!cfg.diagnostics.radii.empty()) di["radii"] = cfg.diagnostics.radii;
    if (!cfg.diagnostics.z_grid.empty()) di["z_grid"] = cfg.diagnostics.z_grid;
    if (!cfg.diagnostics.localization_radii.empty())
        di["localization_radii"] = cfg.diagnostics.localization_radii;
    j["diagnostics"] = di;
    if (cfg.sweep.present)
        j["sweep"] = {{"epsilon_list", cfg.sweep.eps_list}, {"M_list", cfg.sweep.M_list}};
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

}  // namespace coag
