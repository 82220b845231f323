#include "robe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "robe/equilibria.hpp"
#include "robe/errors.hpp"
#include "robe/stability.hpp"

namespace robe::cli {

namespace {

using Value = std::variant<std::monostate, double, bool, long, std::string>;

/// Ordered flat key/value report rendered identically to CSV or JSON.
class Record {
public:
    Record& add(std::string key, Value v) {
        fields_.emplace_back(std::move(key), std::move(v));
        return *this;
    }
    Record& add_opt(std::string key, bool present, double v) {
        return add(std::move(key), present ? Value{v} : Value{});
    }

    std::string csv_header() const {
        std::string line;
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            line += (i ? "," : "") + csv_field(fields_[i].first);
        }
        return line;
    }

    std::string csv_row() const {
        std::string line;
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            if (i) {
                line += ',';
            }
            line += std::visit(
                [](const auto& v) -> std::string {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        return {};
                    } else if constexpr (std::is_same_v<T, double>) {
                        return format_number(v);
                    } else if constexpr (std::is_same_v<T, bool>) {
                        return v ? "true" : "false";
                    } else if constexpr (std::is_same_v<T, long>) {
                        return std::to_string(v);
                    } else {
                        return csv_field(v);
                    }
                },
                fields_[i].second);
        }
        return line;
    }

    nlohmann::ordered_json json() const {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [key, value] : fields_) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        j[key] = nullptr;
                    } else {
                        j[key] = v;
                    }
                },
                value);
        }
        return j;
    }

private:
    std::vector<std::pair<std::string, Value>> fields_;
};

/// Writes to cfg.output when set, otherwise to the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw std::runtime_error(fmt::format("cannot open output file '{}'", path));
            }
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void emit(const Record& rec, const std::string& command, Format format, std::ostream& os) {
    if (format == Format::Csv) {
        os << rec.csv_header() << '\n' << rec.csv_row() << '\n';
    } else {
        nlohmann::ordered_json j{{"command", command}};
        j.update(rec.json());
        os << j.dump(2) << '\n';
    }
}

Record param_fields(const Params& p) {
    Record rec;
    rec.add("mu", p.mu).add("k", p.k).add("a1", p.a1_oblate).add("n_sq", p.n_sq);
    return rec;
}

struct SweepCell {
    Params params;
    bool exists = false;
    double x = 0.0;
    double z = 0.0;
    CharCoeffs coeffs;
    double max_real_part = 0.0;
    Classification classification = Classification::MarginallyStable;
};

SweepCell evaluate_cell(const Params& params, double tol) {
    SweepCell cell;
    cell.params = params;
    const auto tp = triangular_points(params);
    cell.exists = tp.exists;
    if (tp.exists) {
        const auto a = analyze(params, tol);
        cell.x = tp.x_eq;
        cell.z = tp.z_plus;
        cell.coeffs = a.closed_form;
        cell.max_real_part = a.verdict.max_real_part;
        cell.classification = a.verdict.classification;
    }
    return cell;
}

Record sweep_record(const SweepCell& c) {
    Record rec;
    rec.add("mu", c.params.mu).add("k", c.params.k).add("a1", c.params.a1_oblate).add("exists", c.exists);
    rec.add_opt("x", c.exists, c.x).add_opt("z", c.exists, c.z);
    rec.add_opt("p", c.exists, c.coeffs.p).add_opt("q", c.exists, c.coeffs.q).add_opt("r", c.exists, c.coeffs.r);
    rec.add_opt("max_real_part", c.exists, c.max_real_part);
    rec.add("classification", c.exists ? Value{std::string(to_string(c.classification))} : Value{});
    return rec;
}

void write_region_svg(const std::vector<SweepCell>& cells, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error(fmt::format("cannot open SVG file '{}'", path));
    }
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 0.0;
    for (const auto& c : cells) {
        const double y = 2.0 * c.params.k / c.params.n_sq;
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (ymax - ymin <= 0.0) {
        ymin -= 1.0;
    }
    constexpr double W = 400.0, H = 400.0, M = 40.0;
    auto sx = [&](double v) { return M + (v - xmin) / (xmax - xmin) * (W - 2 * M); };
    auto sy = [&](double v) { return H - M - (v - ymin) / (ymax - ymin) * (H - 2 * M); };

    os << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", W, H);
    os << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">mu</text>\n", W - M, H - 10);
    os << fmt::format("<text x=\"5\" y=\"{}\" font-size=\"12\">2k/n^2</text>\n", M - 10);
    // Boundary lines k = 0, mu = 1 and 2k/n^2 + mu = 0.
    os << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", sx(0), sy(0), sx(1), sy(0));
    os << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", sx(1), sy(0), sx(1),
                      sy(std::max(-1.0, ymin)));
    os << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\"/>\n", sx(0), sy(0),
                      sx(std::min(1.0, -ymin)), sy(std::max(-1.0, ymin)));
    for (const auto& c : cells) {
        const double y = 2.0 * c.params.k / c.params.n_sq;
        os << fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"2\" fill=\"{}\"/>\n", sx(c.params.mu), sy(y),
                          c.exists ? "steelblue" : "lightgray");
    }
    os << "</svg>\n";
}

PhaseState parse_state(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        v.push_back(std::stod(item));
    }
    if (v.size() != 6) {
        throw std::invalid_argument("--state needs six comma-separated values x,y,z,vx,vy,vz");
    }
    return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, 0.0};
}

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

std::vector<double> Range::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
    }
    if (count > 1) {
        out.back() = max;
    }
    return out;
}

Range parse_range(const std::string& text) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos) {
        throw std::invalid_argument(fmt::format("range '{}' must look like MIN:MAX:N", text));
    }
    Range r;
    try {
        std::size_t used = 0;
        r.min = std::stod(text.substr(0, first));
        r.max = std::stod(text.substr(first + 1, second - first - 1));
        const std::string count = text.substr(second + 1);
        r.count = std::stoi(count, &used);
        if (used != count.size()) {
            throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw std::invalid_argument(fmt::format("range '{}' must look like MIN:MAX:N", text));
    }
    if (r.count < 1) {
        throw std::invalid_argument(fmt::format("range '{}' needs a count >= 1", text));
    }
    if (!(r.min <= r.max)) {
        throw std::invalid_argument(fmt::format("range '{}' is not ordered", text));
    }
    return r;
}

int run_locate(const RunConfig& cfg, std::ostream& out) {
    const Params& p = cfg.params;
    const auto tp = triangular_points(p);
    const auto rep = existence_report(p);

    Record rec = param_fields(p);
    rec.add("k_negative", rep.k_negative)
        .add("region_ok", rep.region_ok)
        .add("radicand_ok", rep.radicand_ok)
        .add("verdict", rep.verdict)
        .add("exists", tp.exists)
        .add_opt("a1_aux", rep.k_negative, tp.a1_aux)
        .add_opt("b1_aux", rep.k_negative, tp.b1_aux)
        .add_opt("x", tp.exists, tp.x_eq)
        .add_opt("z_plus", tp.exists, tp.z_plus)
        .add_opt("z_minus", tp.exists, tp.z_minus)
        .add_opt("residual_plus", tp.exists, tp.exists ? grad_omega(tp.upper(), p).max_abs() : 0.0)
        .add_opt("residual_minus", tp.exists, tp.exists ? grad_omega(tp.lower(), p).max_abs() : 0.0);

    Sink sink(cfg.output, out);
    emit(rec, "locate", cfg.format, sink.get());
    return tp.exists ? kExitOk : kExitNoEquilibrium;
}

int run_stability(const RunConfig& cfg, std::ostream& out) {
    const Params& p = cfg.params;
    if (!triangular_points(p).exists) {
        throw DomainError(fmt::format("no triangular points for mu = {}, k = {}, A1 = {}", p.mu, p.k, p.a1_oblate));
    }
    const auto a = analyze(p, cfg.tol);

    Record rec = param_fields(p);
    rec.add("p", a.closed_form.p).add("q", a.closed_form.q).add("r", a.closed_form.r);
    rec.add("p_hessian", a.from_hessian.p).add("q_hessian", a.from_hessian.q).add("r_hessian", a.from_hessian.r);
    rec.add("coeff_rel_diff", a.coeff_rel_diff);
    for (std::size_t i = 0; i < a.roots.size(); ++i) {
        rec.add(fmt::format("root{}_re", i), a.roots[i].real());
        rec.add(fmt::format("root{}_im", i), a.roots[i].imag());
    }
    rec.add("sign_changes", static_cast<long>(a.verdict.sign_changes))
        .add("classification", std::string(to_string(a.verdict.classification)))
        .add("max_real_part", a.verdict.max_real_part)
        .add("positive_real_root_count", static_cast<long>(a.verdict.positive_real_root_count));

    Sink sink(cfg.output, out);
    emit(rec, "stability", cfg.format, sink.get());
    return kExitOk;
}

int run_integrate(const RunConfig& cfg, std::ostream& out) {
    const Params& p = cfg.params;
    validate(cfg.integrator);

    PhaseState state0;
    std::optional<Vec3> eq_point;
    std::optional<double> lambda_plus;
    if (cfg.from_equilibrium) {
        const auto tp = triangular_points(p);
        if (!tp.exists) {
            throw DomainError(fmt::format("no triangular points for mu = {}, k = {}, A1 = {}", p.mu, p.k, p.a1_oblate));
        }
        eq_point = cfg.lower_branch ? tp.lower() : tp.upper();
        state0 = cfg.offset > 0.0 ? seed_along_dominant_mode(*eq_point, p, cfg.offset) : PhaseState{*eq_point, {}, 0.0};
        lambda_plus = analyze(p, cfg.tol).verdict.max_real_part;
    } else if (cfg.initial_state) {
        state0 = *cfg.initial_state;
    } else {
        throw UsageError("integrate needs --from-equilibrium or --state");
    }

    const auto traj = integrate(state0, p, cfg.integrator);

    {
        const std::string path = cfg.output.empty() ? "trajectory.csv" : cfg.output;
        std::ofstream csv(path, std::ios::binary);
        if (!csv) {
            throw std::runtime_error(fmt::format("cannot open output file '{}'", path));
        }
        csv << "t,x,y,z,vx,vy,vz,jacobi\n";
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            const auto& s = traj.samples[i];
            csv << format_number(s.t) << ',' << format_number(s.pos.x) << ',' << format_number(s.pos.y) << ','
                << format_number(s.pos.z) << ',' << format_number(s.vel.x) << ',' << format_number(s.vel.y) << ','
                << format_number(s.vel.z) << ',' << format_number(traj.jacobi[i]) << '\n';
        }
    }

    nlohmann::ordered_json summary{{"command", "integrate"}};
    summary.update(param_fields(p).json());
    summary["t_end"] = cfg.integrator.t_end;
    summary["status"] = to_string(traj.status);
    summary["accepted_steps"] = traj.accepted_steps;
    summary["rejected_steps"] = traj.rejected_steps;
    summary["rows"] = traj.samples.size();
    summary["jacobi_initial"] = traj.jacobi.front();
    summary["jacobi_drift"] = traj.jacobi_drift();
    summary["lambda_plus"] = lambda_plus ? nlohmann::ordered_json(*lambda_plus) : nlohmann::ordered_json(nullptr);
    summary["growth_rate"] = nullptr;
    summary["growth_error"] = nullptr;
    if (eq_point && cfg.offset > 0.0) {
        try {
            summary["growth_rate"] = growth_rate(traj, *eq_point);
        } catch (const std::exception& e) {
            summary["growth_error"] = e.what();
        }
    }

    Sink sink(cfg.summary, out);
    sink.get() << summary.dump(2) << '\n';
    return kExitOk;
}

int run_sweep(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.grid) {
        throw UsageError("sweep needs --grid-mu, --grid-k and --grid-a1");
    }
    const auto mus = cfg.grid->mu.values();
    const auto ks = cfg.grid->k.values();
    const auto a1s = cfg.grid->a1.values();

    std::vector<Params> cells;
    cells.reserve(mus.size() * ks.size() * a1s.size());
    for (double mu : mus) {
        for (double k : ks) {
            for (double a1 : a1s) {
                cells.push_back(Params::make(mu, k, a1));
            }
        }
    }

    std::vector<SweepCell> results(cells.size());
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < cells.size(); i += workers) {
                    results[i] = evaluate_cell(cells[i], cfg.tol);
                }
            });
        }
    }

    Sink sink(cfg.output, out);
    std::ostream& os = sink.get();
    if (cfg.format == Format::Csv) {
        os << "mu,k,a1,exists,x,z,p,q,r,max_real_part,classification\n";
        for (const auto& c : results) {
            os << sweep_record(c).csv_row() << '\n';
        }
    } else {
        nlohmann::ordered_json j{{"command", "sweep"}, {"rows", nlohmann::ordered_json::array()}};
        for (const auto& c : results) {
            j["rows"].push_back(sweep_record(c).json());
        }
        os << j.dump(2) << '\n';
    }
    if (!cfg.svg_region.empty()) {
        write_region_svg(results, cfg.svg_region);
    }
    return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Triangular equilibria and linear stability in the generalized Robe problem", "robe"};
    app.set_config("--config", "", "key=value file mirroring the flags (flags win)");
    app.require_subcommand(1);

    std::optional<double> mu, k;
    double a1 = 0.0;
    double tol = 1e-9;
    double t_end = 60.0;
    double rtol = 1e-12, atol = 1e-12, max_step = 1.0;
    double offset = 1e-8;
    std::string grid_mu, grid_k, grid_a1 = "0:0:1";
    std::string output, summary, format = "json", svg_region, state;
    bool from_eq = false, lower = false;

    app.add_option("--mu", mu, "mass ratio m2/(m1+m2)");
    app.add_option("--k", k, "buoyancy parameter");
    app.add_option("--a1", a1, "oblateness coefficient A1")->capture_default_str();
    app.add_option("--tol", tol, "classification tolerance on real parts")->capture_default_str();
    app.add_option("--t-end", t_end, "integration span")->capture_default_str();
    app.add_option("--rtol", rtol, "relative tolerance")->capture_default_str();
    app.add_option("--atol", atol, "absolute tolerance")->capture_default_str();
    app.add_option("--max-step", max_step, "largest integrator step")->capture_default_str();
    app.add_option("--offset", offset, "seed offset along the dominant mode")->capture_default_str();
    app.add_option("--grid-mu", grid_mu, "MIN:MAX:N");
    app.add_option("--grid-k", grid_k, "MIN:MAX:N");
    app.add_option("--grid-a1", grid_a1, "MIN:MAX:N")->capture_default_str();
    app.add_option("--output", output, "output path (default stdout; integrate: trajectory.csv)");
    app.add_option("--summary", summary, "integrate: summary JSON path (default stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--svg-region", svg_region, "sweep: write existence-region SVG");
    app.add_option("--state", state, "integrate: x,y,z,vx,vy,vz");
    app.add_flag("--from-equilibrium", from_eq, "integrate: start at the triangular point");
    app.add_flag("--lower", lower, "integrate: use the z < 0 point");

    auto* locate = app.add_subcommand("locate", "triangular points and existence diagnostics")->fallthrough();
    auto* stability = app.add_subcommand("stability", "characteristic polynomial, roots and verdict")->fallthrough();
    app.add_subcommand("integrate", "nonlinear integration with Jacobi monitor")->fallthrough();
    auto* sweep = app.add_subcommand("sweep", "stability map over a parameter grid")->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    RunConfig cfg;
    try {
        cfg.tol = tol;
        cfg.integrator = IntegratorConfig{rtol, atol, max_step, std::min(1e-3, max_step), t_end};
        cfg.from_equilibrium = from_eq;
        cfg.lower_branch = lower;
        cfg.offset = offset;
        cfg.output = output;
        cfg.summary = summary;
        cfg.svg_region = svg_region;
        cfg.format = format == "csv" ? Format::Csv : Format::Json;
        if (!state.empty()) {
            cfg.initial_state = parse_state(state);
        }

        if (*sweep) {
            cfg.command = Command::Sweep;
            if (grid_mu.empty() || grid_k.empty()) {
                throw UsageError("sweep requires --grid-mu and --grid-k");
            }
            cfg.grid = SweepGrid{parse_range(grid_mu), parse_range(grid_k), parse_range(grid_a1)};
        } else {
            cfg.command = *locate ? Command::Locate : *stability ? Command::Stability : Command::Integrate;
            if (!mu || !k) {
                throw UsageError("--mu and --k are required");
            }
            cfg.params = Params::make(*mu, *k, a1);
            if (cfg.command == Command::Integrate) {
                validate(cfg.integrator);
            }
        }
    } catch (const std::invalid_argument& e) {
        // DomainError from parameter validation lands here too.
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        switch (cfg.command) {
            case Command::Locate:
                return run_locate(cfg, out);
            case Command::Stability:
                return run_stability(cfg, out);
            case Command::Integrate:
                return run_integrate(cfg, out);
            case Command::Sweep:
                return run_sweep(cfg, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNoEquilibrium;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}

}  // namespace robe::cli
