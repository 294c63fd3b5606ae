#include "chiralgate/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chiralgate/analytic.hpp"
#include "chiralgate/disorder.hpp"
#include "chiralgate/exact.hpp"
#include "chiralgate/gate.hpp"
#include "chiralgate/model.hpp"

#ifndef CHIRALGATE_VERSION
#define CHIRALGATE_VERSION "0.0.0"
#endif

namespace chiralgate::experiment {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

double finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw NumericError(what + " is not finite");
    return v;
}

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Read-only view of a config subtree that carries its path for diagnostics.
struct Section {
    const json* node = nullptr;  // null when absent
    std::string path;

    bool present() const { return node != nullptr && !node->is_null(); }
    bool has(const char* key) const {
        return present() && node->is_object() && node->contains(key) &&
               !(*node)[key].is_null();
    }

    Section child(const char* key) const {
        Section s{nullptr, path + "." + key};
        if (has(key)) s.node = &(*node)[key];
        return s;
    }

    void allow_only(std::initializer_list<const char*> keys) const {
        if (!present()) return;
        if (!node->is_object()) fail(path, "expected an object");
        for (const auto& item : node->items()) {
            bool known = std::any_of(keys.begin(), keys.end(),
                                     [&](const char* k) { return item.key() == k; });
            if (!known) fail(path + "." + item.key(), "unknown field");
        }
    }

    double number(const char* key, std::optional<double> fallback = {}) const {
        if (!has(key)) {
            if (fallback) return *fallback;
            fail(path + "." + key, "missing required number");
        }
        const json& v = (*node)[key];
        if (!v.is_number()) fail(path + "." + key, "expected a number");
        return v.get<double>();
    }

    int integer(const char* key, std::optional<int> fallback = {}) const {
        if (!has(key)) {
            if (fallback) return *fallback;
            fail(path + "." + key, "missing required integer");
        }
        const json& v = (*node)[key];
        if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
        return v.get<int>();
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = (*node)[key];
        if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
        return v.get<bool>();
    }

    std::string text(const char* key, std::optional<std::string> fallback = {}) const {
        if (!has(key)) {
            if (fallback) return *fallback;
            fail(path + "." + key, "missing required string");
        }
        const json& v = (*node)[key];
        if (!v.is_string()) fail(path + "." + key, "expected a string");
        return v.get<std::string>();
    }
};

// A sweep is either an explicit array of numbers or {min, max, points[, scale]}.
std::vector<double> sweep_values(const Section& s,
                                 std::optional<std::vector<double>> fallback = {}) {
    if (!s.present()) {
        if (fallback) return *fallback;
        fail(s.path, "missing required sweep (array or {min,max,points[,scale]})");
    }
    if (s.node->is_array()) {
        std::vector<double> vals;
        for (const auto& v : *s.node) {
            if (!v.is_number()) fail(s.path, "sweep arrays must hold numbers");
            vals.push_back(v.get<double>());
        }
        if (vals.empty()) fail(s.path, "sweep array is empty");
        return vals;
    }
    if (!s.node->is_object()) fail(s.path, "expected an array or {min,max,points[,scale]}");
    s.allow_only({"min", "max", "points", "scale"});
    double lo = s.number("min");
    double hi = s.number("max");
    int n = s.integer("points");
    if (n < 1) fail(s.path + ".points", "must be >= 1");
    if (n > 1 && hi < lo) fail(s.path + ".max", "must be >= min");
    std::string scale = s.text("scale", std::string("linear"));
    std::vector<double> vals(n);
    if (scale == "linear") {
        for (int i = 0; i < n; ++i)
            vals[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    } else if (scale == "log") {
        if (lo <= 0 || hi <= 0) fail(s.path, "log scale needs positive min and max");
        double la = std::log(lo), lb = std::log(hi);
        for (int i = 0; i < n; ++i)
            vals[i] = (n == 1) ? lo : std::exp(la + (lb - la) * i / (n - 1));
    } else {
        fail(s.path + ".scale", "expected \"linear\" or \"log\"");
    }
    return vals;
}

std::vector<int> integer_list(const Section& root, const char* key) {
    Section s = root.child(key);
    if (!s.node->is_array()) fail(s.path, "expected an array of integers");
    std::vector<int> vals;
    for (const auto& v : *s.node) {
        if (!v.is_number_integer()) fail(s.path, "expected an array of integers");
        vals.push_back(v.get<int>());
    }
    if (vals.empty()) fail(s.path, "array is empty");
    return vals;
}

std::vector<double> number_array(const Section& sec, const char* key, int expected) {
    const json& v = (*sec.node)[key];
    std::string where = sec.path + "." + key;
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(where, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    if (static_cast<int>(out.size()) != expected)
        fail(where, "expected " + std::to_string(expected) + " entries");
    return out;
}

EmitterChain parse_chain(const Section& root, int default_n) {
    Section c = root.child("chain");
    c.allow_only({"n_emitters", "gamma_b", "gamma_s", "gamma_b_tot", "gamma_s_tot",
                  "k0d_over_pi", "detunings", "rate_scales", "positions"});
    int n = c.integer("n_emitters", default_n);
    if (n < 1) fail(c.path + ".n_emitters", "must be >= 1");
    double gb = 0.0, gs = 0.0;
    if (c.has("gamma_b_tot") || c.has("gamma_s_tot")) {
        if (c.has("gamma_b") || c.has("gamma_s"))
            fail(c.path, "give rates either as gamma_b/gamma_s (units gamma_0) or "
                         "gamma_b_tot/gamma_s_tot (units gamma_tot), not both");
        double b = c.number("gamma_b_tot", 0.0);
        double s = c.number("gamma_s_tot", 0.0);
        double denom = 1.0 - b - s;
        if (b < 0 || s < 0 || denom <= 0)
            fail(c.path, "gamma_b_tot and gamma_s_tot must be >= 0 with sum < 1");
        gb = b / denom;
        gs = s / denom;
    } else {
        gb = c.number("gamma_b", 0.0);
        gs = c.number("gamma_s", 0.0);
    }
    double k0d = c.number("k0d_over_pi", 1.0) * std::numbers::pi;
    EmitterChain chain = EmitterChain::uniform(n, gb, gs, k0d);
    if (c.has("detunings")) chain.detunings = number_array(c, "detunings", n);
    if (c.has("rate_scales")) chain.rate_scales = number_array(c, "rate_scales", n);
    if (c.has("positions")) chain.positions = number_array(c, "positions", n);
    ValidationReport report = validate_chain(chain);
    if (!report.ok()) {
        std::string msg;
        for (const auto& p : report.problems) {
            if (!msg.empty()) msg += "; ";
            msg += p;
        }
        fail(c.path, msg);
    }
    return chain;
}

struct PulsePair {
    PulseSpec right, left;
};

PulsePair parse_pulses(const Section& root, double alpha) {
    Section p = root.child("pulse");
    p.allow_only({"width", "center", "delay"});
    double width = p.number("width", 0.05);
    if (width <= 0) fail(p.path + ".width", "must be > 0");
    double center = analytic::detuning_for_phase(alpha);
    if (p.has("center")) {
        const json& v = (*p.node)["center"];
        if (v.is_number()) {
            center = v.get<double>();
        } else if (!v.is_string() || v.get<std::string>() != "auto") {
            fail(p.path + ".center", "expected a number or \"auto\"");
        }
    }
    double delay = p.number("delay", 0.0);
    PulsePair pulses;
    pulses.right = PulseSpec{center, width, 0.0, Direction::Right};
    pulses.left = PulseSpec{center, width, delay, Direction::Left};
    return pulses;
}

gate::ChoiSetup parse_setup(const Section& root, const EmitterChain& chain,
                            std::optional<double> alpha_override = {}) {
    double alpha = alpha_override
                       ? *alpha_override
                       : root.number("target_phase_over_pi", 1.0) * std::numbers::pi;
    if (alpha <= 0 || alpha >= 2 * std::numbers::pi)
        fail("config.target_phase_over_pi", "must lie in (0, 2)");

    gate::ChoiSetup setup;
    setup.target_phase = alpha;
    setup.chain = chain;
    PulsePair pulses = parse_pulses(root, alpha);
    setup.pulse_right = pulses.right;
    setup.pulse_left = pulses.left;

    Section g = root.child("grid");
    g.allow_only({"points", "span_sigmas"});
    setup.grid_points = g.integer("points", 257);
    setup.grid_span_sigmas = g.number("span_sigmas", 8.0);
    if (setup.grid_points < 9) fail(g.path + ".points", "must be >= 9");
    if (setup.grid_span_sigmas <= 0) fail(g.path + ".span_sigmas", "must be > 0");

    // Filter: absent -> 6 sigma window on the carrier, null -> no filter,
    // {"sigmas": s} -> s sigma window, or explicit {"center", "half_width"}.
    bool explicit_none = root.present() && root.node->contains("filter") &&
                         (*root.node)["filter"].is_null();
    if (explicit_none) {
        setup.filter.reset();
    } else {
        Section f = root.child("filter");
        if (!f.present()) {
            setup.filter = gate::FrequencyWindow{pulses.right.center, 6.0 * pulses.right.width};
        } else {
            f.allow_only({"sigmas", "center", "half_width"});
            if (f.has("sigmas")) {
                if (f.has("center") || f.has("half_width"))
                    fail(f.path, "give either sigmas or center/half_width");
                double s = f.number("sigmas");
                if (s <= 0) fail(f.path + ".sigmas", "must be > 0");
                setup.filter = gate::FrequencyWindow{pulses.right.center, s * pulses.right.width};
            } else {
                double c = f.number("center");
                double h = f.number("half_width");
                if (h <= 0) fail(f.path + ".half_width", "must be > 0");
                setup.filter = gate::FrequencyWindow{c, h};
            }
        }
    }
    return setup;
}

enum class MethodSel { Analytic, Exact, Both };

MethodSel parse_method(const Section& root, MethodSel fallback) {
    if (!root.has("method")) return fallback;
    std::string m = root.text("method");
    if (m == "analytic") return MethodSel::Analytic;
    if (m == "exact") return MethodSel::Exact;
    if (m == "both") return MethodSel::Both;
    fail("config.method", "expected \"analytic\", \"exact\" or \"both\"");
}

void require_exact_method(const Section& root, const char* experiment) {
    if (parse_method(root, MethodSel::Exact) != MethodSel::Exact)
        fail("config.method", std::string(experiment) + " requires method \"exact\"");
}

struct Writer {
    fs::path dir;
    std::string prefix;
    std::string header;
    std::vector<std::string> written;

    fs::path target(const std::string& suffix) const { return dir / (prefix + suffix); }

    std::ofstream open(const std::string& suffix) {
        fs::path p = target(suffix);
        std::ofstream out(p);
        if (!out) throw NumericError("cannot open " + p.string());
        written.push_back(p.string());
        out << header;
        return out;
    }

    void discard_outputs() {
        for (const auto& f : written) {
            std::error_code ec;
            fs::remove(f, ec);
        }
        written.clear();
    }
};

struct Ctx {
    Writer writer;
    json results = json::object();
    json warnings = json::array();
    std::uint64_t seed = 0;
};

void check_result(const GateResult& r) {
    finite(r.fidelity, "fidelity");
    finite(r.success_probability, "success probability");
    finite(r.fidelity_unfiltered, "unfiltered fidelity");
}

void write_map_csv(Ctx& ctx, const std::string& suffix, const FrequencyGrid& grid,
                   const Eigen::MatrixXcd& amps) {
    std::ofstream out = ctx.writer.open(suffix);
    out << "omega1,omega2,re,im\n";
    Eigen::VectorXd v = grid.values();
    for (int i = 0; i < v.size(); ++i) {
        for (int j = 0; j < v.size(); ++j) {
            const Complex a = amps(i, j);
            out << fmt(v[i]) << ',' << fmt(v[j]) << ',' << fmt(a.real()) << ','
                << fmt(a.imag()) << '\n';
        }
    }
}

void run_single_photon_spectrum(const Section& root, Ctx& ctx) {
    root.allow_only({"experiment", "method", "seed", "output_prefix", "chain", "spectrum"});
    if (root.has("method") && root.text("method") != "exact")
        fail("config.method", "single-photon-spectrum supports only \"exact\"");
    EmitterChain chain = parse_chain(root, 1);

    Section s = root.child("spectrum");
    s.allow_only({"min", "max", "points"});
    double lo = s.number("min", -2.0);
    double hi = s.number("max", 2.0);
    int pts = s.integer("points", 401);
    if (pts < 2) fail(s.path + ".points", "must be >= 2");
    if (hi <= lo) fail(s.path + ".max", "must exceed min");

    FrequencyGrid grid{lo, hi, pts};
    exact::SinglePhotonS right = exact::single_photon_s(chain, Direction::Right, grid);
    exact::SinglePhotonS left = exact::single_photon_s(chain, Direction::Left, grid);

    std::ofstream out = ctx.writer.open(".csv");
    out << "omega,re_t_right,im_t_right,re_r_right,im_r_right,"
           "re_t_left,im_t_left,re_r_left,im_r_left\n";
    Eigen::VectorXd w = grid.values();
    double min_abs_t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pts; ++i) {
        const Complex tr = right.transmission[i], rr = right.reflection[i];
        const Complex tl = left.transmission[i], rl = left.reflection[i];
        min_abs_t = std::min(min_abs_t, std::abs(tr));
        out << fmt(w[i]) << ',' << fmt(tr.real()) << ',' << fmt(tr.imag()) << ','
            << fmt(rr.real()) << ',' << fmt(rr.imag()) << ',' << fmt(tl.real()) << ','
            << fmt(tl.imag()) << ',' << fmt(rl.real()) << ',' << fmt(rl.imag()) << '\n';
    }

    exact::ScatteringEngine engine(chain);
    Complex t0 = engine.transmission(0.0, Direction::Right);
    ctx.results["t_right_at_zero"] = {{"re", finite(t0.real(), "t(0)")},
                                      {"im", finite(t0.imag(), "t(0)")},
                                      {"abs", std::abs(t0)},
                                      {"phase", std::arg(t0)}};
    ctx.results["min_abs_t_right"] = finite(min_abs_t, "min |t|");
    ctx.results["beta"] = chain.beta();
    ctx.results["directionality"] = chain.directionality();
}

void run_two_photon_map(const Section& root, Ctx& ctx) {
    root.allow_only({"experiment", "method", "seed", "output_prefix", "chain", "pulse",
                     "target_phase_over_pi", "map"});
    EmitterChain chain = parse_chain(root, 12);
    double alpha = root.number("target_phase_over_pi", 1.0) * std::numbers::pi;
    PulsePair pulses = parse_pulses(root, alpha);

    Section m = root.child("map");
    m.allow_only({"points", "span_sigmas"});
    int pts = m.integer("points", 201);
    double span = m.number("span_sigmas", 4.0);
    if (pts < 9) fail(m.path + ".points", "must be >= 9");
    if (span <= 0) fail(m.path + ".span_sigmas", "must be > 0");

    FrequencyGrid grid =
        FrequencyGrid::centered(pulses.right.center, span * pulses.right.width, pts);
    TwoPhotonState psi = TwoPhotonState::product(pulses.right, pulses.left, grid, grid);
    MethodSel method = parse_method(root, MethodSel::Both);
    ctx.results["input_norm"] = finite(psi.norm(), "input norm");

    Eigen::MatrixXcd exact_map, analytic_map;
    if (method != MethodSel::Analytic) {
        exact::ScatteringEngine engine(chain);
        exact::ScatterOutput so = engine.scatter_state(psi);
        if (so.grid_coarse_warning)
            ctx.warnings.push_back("scatter grid underresolves the pulse");
        exact_map = std::move(so.state.amplitudes);
        write_map_csv(ctx, "_exact.csv", grid, exact_map);
        TwoPhotonState tmp{grid, grid, exact_map};
        ctx.results["norm_exact"] = finite(tmp.norm(), "exact map norm");
    }
    if (method != MethodSel::Exact) {
        Eigen::VectorXd w = grid.values();
        analytic_map.resize(pts, pts);
        for (int i = 0; i < pts; ++i) {
            const Complex p1 = analytic::single_photon_phase(w[i], chain.n_emitters);
            for (int j = 0; j < pts; ++j) {
                const Complex p2 = analytic::single_photon_phase(w[j], chain.n_emitters);
                analytic_map(i, j) =
                    p1 * p2 * analytic::t_elastic(w[i], w[j]) * psi.amplitudes(i, j);
            }
        }
        write_map_csv(ctx, "_analytic.csv", grid, analytic_map);
        TwoPhotonState tmp{grid, grid, analytic_map};
        ctx.results["norm_analytic"] = finite(tmp.norm(), "analytic map norm");
    }
    if (method == MethodSel::Both) {
        double diff = (analytic_map - exact_map).norm() / exact_map.norm();
        ctx.results["map_difference_rel_l2"] = finite(diff, "map difference");
    }
}

void run_fidelity_vs_width(const Section& root, Ctx& ctx) {
    root.allow_only({"experiment", "method", "seed", "output_prefix", "chain", "n_values",
                     "width", "pulse", "target_phase_over_pi", "filter", "grid"});
    EmitterChain base = parse_chain(root, 12);
    Section c = root.child("chain");
    bool per_emitter = c.has("detunings") || c.has("rate_scales") || c.has("positions");

    std::vector<int> ns;
    if (root.has("n_values")) {
        if (per_emitter)
            fail("config.n_values", "cannot combine with per-emitter chain arrays");
        ns = integer_list(root, "n_values");
        for (int n : ns)
            if (n < 1) fail("config.n_values", "entries must be >= 1");
    } else {
        ns = {base.n_emitters};
    }
    std::vector<double> widths = sweep_values(root.child("width"));
    for (double s : widths)
        if (s <= 0) fail("config.width", "widths must be > 0");

    MethodSel method = parse_method(root, MethodSel::Exact);
    gate::ChoiSetup setup0 = parse_setup(root, base);

    std::ofstream out = ctx.writer.open(".csv");
    if (method != MethodSel::Exact)
        out << "# n = 0 rows hold the infinite-chain analytic result\n";
    out << "method,n,sigma,fidelity,success,fidelity_unfiltered\n";

    json best = json::array();
    if (method != MethodSel::Exact) {
        double best_f = -1, best_s = 0, best_r = 0;
        for (double sigma : widths) {
            GateResult r = gate::fidelity_analytic(gate::with_width(setup0, sigma));
            check_result(r);
            out << "analytic,0," << fmt(sigma) << ',' << fmt(r.fidelity) << ','
                << fmt(r.success_probability) << ',' << fmt(r.fidelity_unfiltered) << '\n';
            if (r.fidelity > best_f) {
                best_f = r.fidelity;
                best_s = sigma;
                best_r = r.success_probability;
            }
        }
        best.push_back({{"method", "analytic"},
                        {"n", 0},
                        {"sigma", best_s},
                        {"fidelity", best_f},
                        {"success", best_r}});
    }
    if (method != MethodSel::Analytic) {
        for (int n : ns) {
            gate::ChoiSetup setup_n = setup0;
            setup_n.chain = per_emitter
                                ? base
                                : EmitterChain::uniform(n, base.gamma_b, base.gamma_s,
                                                        base.k0d);
            double best_f = -1, best_s = 0, best_r = 0;
            for (double sigma : widths) {
                GateResult r = gate::fidelity_exact(gate::with_width(setup_n, sigma));
                check_result(r);
                if (r.metadata.grid_coarse)
                    ctx.warnings.push_back("scatter grid underresolves sigma = " +
                                           fmt(sigma));
                out << "exact," << n << ',' << fmt(sigma) << ',' << fmt(r.fidelity)
                    << ',' << fmt(r.success_probability) << ','
                    << fmt(r.fidelity_unfiltered) << '\n';
                if (r.fidelity > best_f) {
                    best_f = r.fidelity;
                    best_s = sigma;
                    best_r = r.success_probability;
                }
            }
            best.push_back({{"method", "exact"},
                            {"n", n},
                            {"sigma", best_s},
                            {"fidelity", best_f},
                            {"success", best_r}});
        }
    }
    ctx.results["best"] = best;
}

void run_chirality_vs_n(const Section& root, Ctx& ctx) {
    root.allow_only({"experiment", "method", "seed", "output_prefix", "chain", "n_min",
                     "n_max", "pulse", "target_phase_over_pi", "filter", "grid"});
    require_exact_method(root, "chirality-vs-N");
    EmitterChain base = parse_chain(root, 2);
    int n_min = root.integer("n_min", 2);
    int n_max = root.integer("n_max", 12);
    if (n_min < 1) fail("config.n_min", "must be >= 1");
    if (n_max < n_min) fail("config.n_max", "must be >= n_min");

    gate::ChoiSetup setup = parse_setup(root, base);
    disorder::ChiralitySweepResult sweep =
        disorder::chirality_sweep(setup, n_min, n_max, base.gamma_b, base.gamma_s);

    std::ofstream out = ctx.writer.open(".csv");
    out << "n,sigma_opt,fidelity,success,log_success\n";
    for (const auto& p : sweep.points) {
        finite(p.fidelity, "fidelity");
        out << p.n_emitters << ',' << fmt(p.width) << ',' << fmt(p.fidelity) << ','
            << fmt(p.success_probability) << ','
            << fmt(std::log(p.success_probability)) << '\n';
    }
    ctx.results["log_success_slope"] = finite(sweep.log_success_slope, "slope");
    ctx.results["log_success_r2"] = finite(sweep.log_success_r2, "r2");
    ctx.results["fidelity_non_decreasing"] = sweep.fidelity_non_decreasing;
    ctx.results["beta"] = base.beta();
    ctx.results["directionality"] = base.directionality();
}

void run_phase_sweep(const Section& root, Ctx& ctx) {
    root.allow_only({"experiment", "method", "seed", "output_prefix", "chain",
                     "alpha_over_pi", "width_range", "pulse", "filter", "grid"});
    EmitterChain chain = parse_chain(root, 12);
    std::vector<double> alphas = sweep_values(
        root.child("alpha_over_pi"), std::vector<double>{0.25, 0.4, 0.55, 0.7, 0.85, 1.0});
    Section wr = root.child("width_range");
    wr.allow_only({"min", "max"});
    double wmin = wr.number("min", 0.02);
    double wmax = wr.number("max", 0.4);
    if (wmin <= 0 || wmax <= wmin) fail(wr.path, "need 0 < min < max");

    MethodSel m = parse_method(root, MethodSel::Exact);
    if (m == MethodSel::Both)
        fail("config.method", "phase-sweep supports \"analytic\" or \"exact\"");
    gate::Method gm =
        (m == MethodSel::Analytic) ? gate::Method::Analytic : gate::Method::Exact;

    std::ofstream out = ctx.writer.open(".csv");
    out << "alpha_over_pi,sigma_opt,fidelity,success,one_minus_fidelity\n";
    double worst_infidelity = 0, worst_alpha = 0;
    int boundary_hits = 0;
    for (double a : alphas) {
        if (a <= 0 || a >= 2) fail("config.alpha_over_pi", "values must lie in (0, 2)");
        gate::ChoiSetup setup = parse_setup(root, chain, a * std::numbers::pi);
        gate::WidthOptimum opt = gate::optimize_width(setup, wmin, wmax, gm);
        check_result(opt.result);
        if (opt.at_boundary) {
            ++boundary_hits;
            ctx.warnings.push_back("width optimum at search boundary for alpha/pi = " +
                                   fmt(a));
        }
        double infid = 1.0 - opt.result.fidelity;
        if (infid > worst_infidelity) {
            worst_infidelity = infid;
            worst_alpha = a;
        }
        out << fmt(a) << ',' << fmt(opt.width) << ',' << fmt(opt.result.fidelity) << ','
            << fmt(opt.result.success_probability) << ',' << fmt(infid) << '\n';
    }
    ctx.results["max_one_minus_fidelity"] = worst_infidelity;
    ctx.results["argmax_alpha_over_pi"] = worst_alpha;
    ctx.results["boundary_hits"] = boundary_hits;
}

void run_disorder_heatmap(const Section& root, Ctx& ctx) {
    root.allow_only({"experiment", "method", "seed", "output_prefix", "chain", "pulse",
                     "target_phase_over_pi", "filter", "grid", "disorder", "width_range",
                     "write_records"});
    require_exact_method(root, "disorder-heatmap");
    EmitterChain base = parse_chain(root, 4);
    gate::ChoiSetup setup = parse_setup(root, base);

    if (root.has("width_range")) {
        Section wr = root.child("width_range");
        wr.allow_only({"min", "max"});
        double wmin = wr.number("min");
        double wmax = wr.number("max");
        if (wmin <= 0 || wmax <= wmin) fail(wr.path, "need 0 < min < max");
        gate::WidthOptimum opt = gate::optimize_width(setup, wmin, wmax, gate::Method::Exact);
        if (opt.at_boundary)
            ctx.warnings.push_back("clean-chain width optimum at search boundary");
        setup = gate::with_width(setup, opt.width);
        ctx.results["optimized_width"] = finite(opt.width, "optimized width");
        ctx.results["clean_fidelity"] = finite(opt.result.fidelity, "clean fidelity");
    }

    Section d = root.child("disorder");
    d.allow_only({"sigma_db", "sigma_delta", "position_jitter", "min_spacing",
                  "max_spacing", "delay_mismatch", "n_realizations"});
    std::vector<double> dbs = sweep_values(d.child("sigma_db"), std::vector<double>{0.0});
    std::vector<double> dels =
        sweep_values(d.child("sigma_delta"), std::vector<double>{0.0});
    int n_real = d.integer("n_realizations", 100);
    if (n_real < 1) fail(d.path + ".n_realizations", "must be >= 1");
    bool jitter = d.boolean("position_jitter", false);

    disorder::DisorderSpec spec;
    spec.n_realizations = n_real;
    spec.delay_mismatch = d.number("delay_mismatch", 0.0);
    if (jitter) {
        spec.position_jitter.kind = disorder::PositionJitter::Kind::UniformSpacing;
        spec.position_jitter.min_spacing = d.number("min_spacing", 0.5);
        spec.position_jitter.max_spacing = d.number("max_spacing", 1.5);
    }

    bool write_records = root.boolean("write_records", false);
    std::ofstream records;
    if (write_records) {
        records = ctx.writer.open("_records.csv");
        records << "sigma_db,sigma_delta,index,fidelity,success\n";
    }

    std::ofstream out = ctx.writer.open(".csv");
    out << "# cell seed: seed + row-major cell index (sigma_db outer)\n";
    out << "sigma_db,sigma_delta,mean_fidelity,std_fidelity,sem_fidelity,"
           "mean_success,std_success,sem_success\n";
    double min_f = std::numeric_limits<double>::infinity(), max_f = -min_f;
    json single_cell;
    int cell = 0;
    for (double db : dbs) {
        for (double sd : dels) {
            if (db < 0) fail(d.path + ".sigma_db", "values must be >= 0");
            if (sd < 0) fail(d.path + ".sigma_delta", "values must be >= 0");
            spec.sigma_gamma_db = db;
            spec.sigma_delta = sd;
            spec.rng_seed = ctx.seed + static_cast<std::uint64_t>(cell);
            disorder::DisorderSummary sum = disorder::monte_carlo_fidelity(base, spec, setup);
            finite(sum.mean_fidelity, "mean fidelity");
            out << fmt(db) << ',' << fmt(sd) << ',' << fmt(sum.mean_fidelity) << ','
                << fmt(sum.std_fidelity) << ',' << fmt(sum.sem_fidelity) << ','
                << fmt(sum.mean_success) << ',' << fmt(sum.std_success) << ','
                << fmt(sum.sem_success) << '\n';
            if (write_records) {
                for (const auto& r : sum.records)
                    records << fmt(db) << ',' << fmt(sd) << ',' << r.index << ','
                            << fmt(r.fidelity) << ',' << fmt(r.success_probability) << '\n';
            }
            min_f = std::min(min_f, sum.mean_fidelity);
            max_f = std::max(max_f, sum.mean_fidelity);
            single_cell = {{"sigma_db", db},
                           {"sigma_delta", sd},
                           {"mean_fidelity", sum.mean_fidelity},
                           {"sem_fidelity", sum.sem_fidelity},
                           {"mean_success", sum.mean_success},
                           {"sem_success", sum.sem_success}};
            ++cell;
        }
    }
    ctx.results["n_realizations"] = n_real;
    ctx.results["min_mean_fidelity"] = min_f;
    ctx.results["max_mean_fidelity"] = max_f;
    if (cell == 1) ctx.results["cell"] = single_cell;
}

void run_delay_sweep(const Section& root, Ctx& ctx) {
    root.allow_only({"experiment", "method", "seed", "output_prefix", "chain", "pulse",
                     "target_phase_over_pi", "filter", "grid", "delay"});
    require_exact_method(root, "delay-sweep");
    EmitterChain base = parse_chain(root, 4);
    gate::ChoiSetup setup = parse_setup(root, base);
    std::vector<double> delays = sweep_values(
        root.child("delay"), std::vector<double>{0,  1,  2,  3,  4,  5, 7.5, 10,
                                                 15, 20, 30, 45, 60, 80, 100});
    for (double t : delays)
        if (t < 0) fail("config.delay", "delays must be >= 0");

    std::vector<disorder::DelayPoint> points = disorder::delay_sweep(base, setup, delays);
    std::ofstream out = ctx.writer.open(".csv");
    out << "# delay in units of 1/gamma_tot, applied to the left pulse\n";
    out << "delay,fidelity,success\n";
    for (const auto& p : points) {
        finite(p.fidelity, "fidelity");
        out << fmt(p.delay) << ',' << fmt(p.fidelity) << ',' << fmt(p.success_probability)
            << '\n';
    }
    ctx.results["fidelity_at_first"] = points.front().fidelity;
    ctx.results["fidelity_at_last"] = points.back().fidelity;
    ctx.results["success_at_last"] = points.back().success_probability;
}

struct Runner {
    const char* name;
    void (*fn)(const Section&, Ctx&);
};

constexpr Runner kRunners[] = {
    {"single-photon-spectrum", run_single_photon_spectrum},
    {"two-photon-map", run_two_photon_map},
    {"fidelity-vs-width", run_fidelity_vs_width},
    {"chirality-vs-N", run_chirality_vs_n},
    {"phase-sweep", run_phase_sweep},
    {"disorder-heatmap", run_disorder_heatmap},
    {"delay-sweep", run_delay_sweep},
};

std::uint64_t parse_seed(const Section& root) {
    if (!root.has("seed")) return 0;
    const json& v = (*root.node)["seed"];
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
        return static_cast<std::uint64_t>(v.get<long long>());
    fail("config.seed", "expected a non-negative integer");
}

}  // namespace

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(path + ": top level must be a JSON object");
    return j;
}

void apply_override(json& config, const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("--set: empty key");
    std::string pointer = "/" + key;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare strings need no quotes
    }
    try {
        config[json::json_pointer(pointer)] = parsed;
    } catch (const std::exception& e) {
        throw ConfigError("--set " + key + ": " + e.what());
    }
}

RunReport run_experiment(json config, const RunOptions& options) {
    RunReport report;
    Ctx ctx;
    try {
        if (!config.is_object()) throw ConfigError("config: expected a JSON object");
        for (const auto& [key, value] : options.overrides)
            apply_override(config, key, value);
        if (options.seed_override) config["seed"] = *options.seed_override;

        Section root{&config, "config"};
        std::string name = root.text("experiment");
        const Runner* runner = nullptr;
        for (const Runner& r : kRunners)
            if (name == r.name) runner = &r;
        if (!runner) {
            std::string known;
            for (const Runner& r : kRunners) {
                if (!known.empty()) known += ", ";
                known += r.name;
            }
            fail("config.experiment", "unknown experiment \"" + name +
                                          "\"; expected one of: " + known);
        }
        ctx.seed = parse_seed(root);
        config["seed"] = ctx.seed;  // echo the resolved seed

        std::string default_prefix = name;
        std::replace(default_prefix.begin(), default_prefix.end(), '-', '_');
        ctx.writer.prefix = root.text("output_prefix", default_prefix);
        ctx.writer.dir = options.out_dir;
        std::error_code ec;
        fs::create_directories(ctx.writer.dir, ec);
        if (ec) fail("--out", "cannot create directory " + ctx.writer.dir.string());

        std::string header;
        header += "# chiralgate " CHIRALGATE_VERSION "\n";
        header += "# experiment: " + name + "\n";
        header += "# seed: " + std::to_string(ctx.seed) + "\n";
        header += "# config: " + config.dump() + "\n";
        if (options.timestamp) header += "# generated: " + utc_now() + "\n";
        ctx.writer.header = header;

        runner->fn(root, ctx);

        json summary;
        summary["version"] = CHIRALGATE_VERSION;
        summary["experiment"] = name;
        summary["seed"] = ctx.seed;
        if (options.timestamp) summary["generated"] = utc_now();
        summary["config"] = config;
        summary["results"] = ctx.results;
        summary["warnings"] = ctx.warnings;

        fs::path sp = ctx.writer.target("_summary.json");
        {
            std::ofstream out(sp);
            if (!out) throw NumericError("cannot open " + sp.string());
            out << summary.dump(2) << "\n";
        }
        ctx.writer.written.push_back(sp.string());

        report.files_written = ctx.writer.written;
        report.summary = std::move(summary);
    } catch (const ConfigError& e) {
        ctx.writer.discard_outputs();
        report.exit_code = 2;
        report.error = e.what();
    } catch (const std::invalid_argument& e) {
        ctx.writer.discard_outputs();
        report.exit_code = 2;
        report.error = e.what();
    } catch (const std::exception& e) {
        ctx.writer.discard_outputs();
        report.exit_code = 3;
        report.error = e.what();
    }
    return report;
}

RunReport run_config_file(const std::string& config_path, const RunOptions& options) {
    json config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        RunReport report;
        report.exit_code = 2;
        report.error = e.what();
        return report;
    }
    return run_experiment(std::move(config), options);
}

}  // namespace chiralgate::experiment
