#include "sislab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "sislab/csv.hpp"
#include "sislab/errors.hpp"

namespace sislab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            std::string t = trim(s.substr(start));
            if (!t.empty())
                out.push_back(t);
            break;
        }
        std::string t = trim(s.substr(start, comma - start));
        if (!t.empty())
            out.push_back(t);
        start = comma + 1;
    }
    return out;
}

int parse_int(const std::string& token, const std::string& what) {
    const char* begin = token.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ValidationError("cannot parse " + what + " from \"" + token + "\"");
    return static_cast<int>(v);
}

std::string join_models(const std::vector<ModelKind>& models) {
    std::string out;
    for (std::size_t i = 0; i < models.size(); ++i)
        out += (i ? "," : "") + model_name(models[i]);
    return out;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out += (i ? "," : "") + csvio::format_full(values[i]);
    return out;
}

void apply_key(ScenarioConfig& c, const std::string& section, const std::string& key,
               const std::string& value) {
    auto num = [&](const std::string& v) { return csvio::parse_double(v, "config key " + key); };
    if (section == "scenario") {
        if (key == "figure") {
            c.figure = value;
        } else if (key == "models") {
            c.models.clear();
            for (const auto& t : split_list(value))
                c.models.push_back(parse_model(t));
        } else if (key == "n_cells") {
            c.n_cells = parse_int(value, "config key n_cells");
        } else if (key == "length") {
            c.length = num(value);
        } else if (key == "out_dir") {
            c.out_dir = value;
        } else {
            throw ValidationError("unknown key \"" + key + "\" in [scenario]");
        }
    } else if (section == "coefficients") {
        if (key == "preset") {
            c.preset = value;
        } else if (key == "coeffs_csv") {
            c.coeffs_csv = value;
        } else if (key == "lambda") {
            c.hom_lambda = num(value);
        } else if (key == "beta") {
            c.hom_beta = num(value);
        } else if (key == "gamma") {
            c.hom_gamma = num(value);
        } else if (key == "mu") {
            c.hom_mu = num(value);
        } else if (key == "total_mass") {
            c.total_mass = num(value);
        } else {
            throw ValidationError("unknown key \"" + key + "\" in [coefficients]");
        }
    } else if (section == "solver") {
        if (key == "d_S") {
            c.d_S = num(value);
        } else if (key == "d_I") {
            c.d_I = num(value);
        } else if (key == "sweep_target") {
            c.sweep_target = value;
        } else if (key == "schedule") {
            c.schedule.clear();
            for (const auto& t : split_list(value))
                c.schedule.push_back(csvio::parse_double(t, "schedule entry"));
        } else if (key == "ratio") {
            c.ratio = num(value);
        } else if (key == "newton_tol") {
            c.newton_tol = num(value);
        } else if (key == "dt_initial") {
            c.dt_initial = num(value);
        } else if (key == "steady_tol") {
            c.steady_tol = num(value);
        } else if (key == "t_max") {
            c.t_max = num(value);
        } else {
            throw ValidationError("unknown key \"" + key + "\" in [solver]");
        }
    } else {
        throw ValidationError("unknown config section [" + section + "]");
    }
}

} // namespace

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig c;
    std::string section;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": unterminated section header \"" + t + "\"");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "scenario" && section != "coefficients" && section != "solver")
                throw ValidationError("unknown config section [" + section + "]");
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected key = value, got \"" + t + "\"");
        if (section.empty())
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": key before any [section] header");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
        if (!seen.insert(section + "." + key).second)
            throw ValidationError("duplicate config key \"" + key + "\" in [" + section + "]");
        apply_key(c, section, key, value);
    }
    return c;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file \"" + path + "\"");
    return parse_config(in);
}

void serialize_config(std::ostream& out, const ScenarioConfig& c) {
    out << "[scenario]\n";
    out << "figure = " << c.figure << '\n';
    out << "models = " << join_models(c.models) << '\n';
    out << "n_cells = " << c.n_cells << '\n';
    out << "length = " << csvio::format_full(c.length) << '\n';
    out << "out_dir = " << c.out_dir << '\n';
    out << '\n';
    out << "[coefficients]\n";
    out << "preset = " << c.preset << '\n';
    if (!c.coeffs_csv.empty())
        out << "coeffs_csv = " << c.coeffs_csv << '\n';
    if (c.preset == "homogeneous") {
        out << "lambda = " << csvio::format_full(c.hom_lambda) << '\n';
        out << "beta = " << csvio::format_full(c.hom_beta) << '\n';
        out << "gamma = " << csvio::format_full(c.hom_gamma) << '\n';
        out << "mu = " << csvio::format_full(c.hom_mu) << '\n';
    }
    out << "total_mass = " << csvio::format_full(c.total_mass) << '\n';
    out << '\n';
    out << "[solver]\n";
    out << "d_S = " << csvio::format_full(c.d_S) << '\n';
    out << "d_I = " << csvio::format_full(c.d_I) << '\n';
    if (!c.sweep_target.empty())
        out << "sweep_target = " << c.sweep_target << '\n';
    if (!c.schedule.empty())
        out << "schedule = " << join_doubles(c.schedule) << '\n';
    out << "ratio = " << csvio::format_full(c.ratio) << '\n';
    out << "newton_tol = " << csvio::format_full(c.newton_tol) << '\n';
    out << "dt_initial = " << csvio::format_full(c.dt_initial) << '\n';
    out << "steady_tol = " << csvio::format_full(c.steady_tol) << '\n';
    out << "t_max = " << csvio::format_full(c.t_max) << '\n';
}

std::string config_to_string(const ScenarioConfig& config) {
    std::ostringstream os;
    serialize_config(os, config);
    return os.str();
}

void validate_scenario(const ScenarioConfig& c) {
    if (c.figure != "custom" && c.figure != "fig1" && c.figure != "fig2" && c.figure != "fig3" &&
        c.figure != "fig4")
        throw ValidationError("figure tag must be one of fig1, fig2, fig3, fig4, custom; got \"" +
                              c.figure + "\"");
    if (c.models.empty())
        throw ValidationError("scenario selects no models");
    std::set<ModelKind> unique(c.models.begin(), c.models.end());
    if (unique.size() != c.models.size())
        throw ValidationError("scenario lists a model more than once");
    if (c.n_cells < 4)
        throw ValidationError("n_cells must be at least 4; got " + std::to_string(c.n_cells));
    if (!(c.length > 0.0) || !std::isfinite(c.length))
        throw ValidationError("domain length must be positive and finite");
    if (c.out_dir.empty())
        throw ValidationError("out_dir is empty");

    if (c.preset != "fig0a" && c.preset != "moderate" && c.preset != "homogeneous" &&
        c.preset != "csv")
        throw ValidationError("unknown coefficient preset \"" + c.preset +
                              "\"; expected fig0a, moderate, homogeneous, or csv");
    if (c.preset == "moderate" && c.n_cells % 4 != 0)
        throw ValidationError("the moderate preset has breakpoints at x = 1/4 and 3/4, so n_cells "
                              "must be divisible by 4; got " +
                              std::to_string(c.n_cells));
    if (c.preset == "csv" && c.coeffs_csv.empty())
        throw ValidationError("preset csv requires a coeffs_csv path");
    if (c.preset == "homogeneous") {
        for (double v : {c.hom_lambda, c.hom_beta, c.hom_gamma, c.hom_mu})
            if (!(v > 0.0) || !std::isfinite(v))
                throw ValidationError("homogeneous coefficients must be positive and finite");
    }
    if (!(c.total_mass > 0.0) || !std::isfinite(c.total_mass))
        throw ValidationError("total_mass must be positive and finite");

    for (double v : {c.d_S, c.d_I})
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("diffusivities must be positive and finite");
    if (!c.sweep_target.empty() && c.sweep_target != "d_S_to_zero" &&
        c.sweep_target != "d_I_to_zero" && c.sweep_target != "both")
        throw ValidationError("sweep_target must be d_S_to_zero, d_I_to_zero, or both; got \"" +
                              c.sweep_target + "\"");
    if (!c.sweep_target.empty() && c.schedule.empty())
        throw ValidationError("sweep_target is set but the schedule is empty");
    for (std::size_t i = 0; i < c.schedule.size(); ++i) {
        if (!(c.schedule[i] > 0.0) || !std::isfinite(c.schedule[i]))
            throw ValidationError("schedule entries must be positive and finite");
        if (i > 0 && !(c.schedule[i] < c.schedule[i - 1]))
            throw ValidationError("schedule must be strictly decreasing");
    }
    if (std::isnan(c.ratio) || c.ratio < 0.0)
        throw ValidationError("ratio must be nonnegative (infinity allowed)");
    for (double v : {c.newton_tol, c.dt_initial, c.steady_tol, c.t_max})
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("solver tolerances and time bounds must be positive and finite");
}

ScenarioConfig figure_config(const std::string& tag) {
    ScenarioConfig c;
    c.figure = tag;
    c.total_mass = 1.0;
    if (tag == "fig1") {
        c.n_cells = 400;
        c.preset = "fig0a";
        c.d_S = 1e-6;
        c.d_I = 1.0;
    } else if (tag == "fig2") {
        c.n_cells = 800;
        c.preset = "fig0a";
        c.d_S = 1.0;
        c.d_I = 1e-5;
    } else if (tag == "fig3") {
        c.n_cells = 800;
        c.preset = "fig0a";
        c.d_S = 1e-5;
        c.d_I = 1e-5;
    } else if (tag == "fig4") {
        c.n_cells = 800;
        c.preset = "moderate";
        c.d_S = 1.0;
        c.d_I = 1e-5;
    } else {
        throw ValidationError("unknown figure tag \"" + tag +
                              "\"; expected fig1, fig2, fig3, or fig4");
    }
    c.out_dir = "out/" + tag;
    validate_scenario(c);
    return c;
}

CoefficientSet build_coefficients(const ScenarioConfig& c, const GridPtr& grid) {
    if (c.preset == "fig0a")
        return preset_fig0a(grid, c.total_mass);
    if (c.preset == "moderate")
        return preset_moderate(grid, c.total_mass);
    if (c.preset == "homogeneous")
        return preset_homogeneous(grid, c.hom_lambda, c.hom_beta, c.hom_gamma, c.hom_mu,
                                  c.total_mass);
    if (c.preset == "csv")
        return load_coeffs_csv_file(grid, c.coeffs_csv, c.total_mass);
    throw ValidationError("unknown coefficient preset \"" + c.preset + "\"");
}

} // namespace sislab
