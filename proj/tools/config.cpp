#include "config.hpp"

#include "mlfrac/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

namespace mlfrac::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where, "missing '" + key + "'");
    return obj.at(key);
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
        if (!ok.count(k)) fail(where, "unknown key '" + k + "'");
    }
}

double number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    // "pi", "2pi", "0.5pi"
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.size() >= 2 && s.ends_with("pi")) {
            const std::string head = s.substr(0, s.size() - 2);
            if (head.empty()) return std::numbers::pi;
            std::size_t used = 0;
            double c = 0.0;
            try {
                c = std::stod(head, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == head.size()) return c * std::numbers::pi;
        }
    }
    fail(where, "expected a number");
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

cplx complex_number(const json& v, const std::string& where) {
    if (v.is_array()) {
        if (v.size() != 2) fail(where, "complex values are [re, im]");
        return {number(v[0], where), number(v[1], where)};
    }
    return number(v, where);
}

std::vector<cplx> complex_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

MatrixSymbol parse_symbol(const json& s, const std::filesystem::path& base, int n) {
    const std::string where = "symbol";
    if (s.contains("file")) {
        only_keys(s, {"file"}, where);
        const auto path = resolve(base, require(s, "file", where).get<std::string>());
        return parse_symbol(read_json(path), path.parent_path(), n);
    }
    if (s.contains("builtin")) {
        const std::string name = s.at("builtin").get<std::string>();
        if (name == "coupled-first-order") {
            only_keys(s, {"builtin", "a"}, where);
            const auto a = numbers(require(s, "a", where), where + ".a");
            if (static_cast<int>(a.size()) != n) fail(where, "a must have one entry per space dimension");
            return builtin::coupled_first_order(a);
        }
        if (name == "diagonal-laplacian") {
            only_keys(s, {"builtin", "m", "power", "coeff"}, where);
            const int m = integer(require(s, "m", where), where + ".m");
            const int power = s.contains("power") ? integer(s.at("power"), where + ".power") : 1;
            const double coeff = s.contains("coeff") ? number(s.at("coeff"), where + ".coeff") : 1.0;
            return builtin::diagonal_laplacian(m, n, power, coeff);
        }
        fail(where, "unknown builtin '" + name + "' (coupled-first-order, diagonal-laplacian)");
    }
    only_keys(s, {"entries"}, where);
    const json& rows = require(s, "entries", where);
    if (!rows.is_array() || rows.empty()) fail(where, "entries must be a non-empty m x m array");
    const int m = static_cast<int>(rows.size());
    MatrixSymbol sym(m, n);
    for (int j = 0; j < m; ++j) {
        if (!rows[j].is_array() || static_cast<int>(rows[j].size()) != m) fail(where, "entries must be square");
        for (int k = 0; k < m; ++k) {
            const std::string w = where + ".entries[" + std::to_string(j) + "][" + std::to_string(k) + "]";
            const json& terms = rows[j][k];
            if (!terms.is_array()) fail(w, "expected a list of terms");
            PolySymbol p(n);
            for (const auto& term : terms) {
                only_keys(term, {"alpha", "coeff"}, w);
                const json& alpha = require(term, "alpha", w);
                if (!alpha.is_array() || static_cast<int>(alpha.size()) != n) fail(w, "alpha needs one exponent per dimension");
                MultiIndex mi;
                for (const auto& e : alpha) {
                    const int v = integer(e, w + ".alpha");
                    if (v < 0) fail(w, "negative exponent");
                    mi.push_back(v);
                }
                p.add_term(mi, complex_number(require(term, "coeff", w), w + ".coeff"));
            }
            sym.at(j, k) = p;
        }
    }
    return sym;
}

StateField parse_initial(const json& s, const std::filesystem::path& base, const SpectralGrid& grid, int m) {
    const std::string where = "initial";
    const std::string type = require(s, "type", where).get<std::string>();
    if (type == "zero") {
        only_keys(s, {"type"}, where);
        return StateField(grid, m);
    }
    if (type == "gaussian") {
        only_keys(s, {"type", "amplitudes", "width", "center"}, where);
        const auto amp = complex_numbers(require(s, "amplitudes", where), where + ".amplitudes");
        if (static_cast<int>(amp.size()) != m) fail(where, "need one amplitude per component");
        const std::vector<double> center = s.contains("center") ? numbers(s.at("center"), where + ".center") : std::vector<double>{};
        return builtin::gaussian(grid, amp, number(require(s, "width", where), where + ".width"), center);
    }
    if (type == "plane-wave") {
        only_keys(s, {"type", "amplitudes", "wavenumber"}, where);
        const auto amp = complex_numbers(require(s, "amplitudes", where), where + ".amplitudes");
        if (static_cast<int>(amp.size()) != m) fail(where, "need one amplitude per component");
        const json& kv = require(s, "wavenumber", where);
        if (!kv.is_array() || static_cast<int>(kv.size()) != grid.dim()) fail(where, "wavenumber needs one integer per axis");
        StateField F(grid, m, Space::frequency);
        std::size_t p = 0;
        for (int d = 0; d < grid.dim(); ++d) {
            const int k = integer(kv[static_cast<std::size_t>(d)], where + ".wavenumber");
            const int N = grid.points(d);
            if (k < -N / 2 || k >= N / 2) fail(where, "wavenumber outside the lattice");
            p += static_cast<std::size_t>((k + N) % N) * grid.stride(d);
        }
        for (int c = 0; c < m; ++c) F.data(static_cast<Eigen::Index>(p), c) = grid.box_volume() * amp[static_cast<std::size_t>(c)];
        return to_physical(F);
    }
    if (type == "file") {
        only_keys(s, {"type", "path"}, where);
        StateField f = to_physical(read_field(resolve(base, require(s, "path", where).get<std::string>())));
        if (!(f.grid == grid) || f.m() != m) fail(where, "field file does not match the grid or component count");
        return f;
    }
    fail(where, "unknown type '" + type + "' (zero, gaussian, plane-wave, file)");
}

void check_source(const json& s, const std::filesystem::path& base, const SpectralGrid& grid, int m) {
    const std::string where = "source";
    const std::string type = require(s, "type", where).get<std::string>();
    if (type == "zero" || type == "manufactured") {
        only_keys(s, {"type"}, where);
    } else if (type == "gaussian") {
        only_keys(s, {"type", "amplitudes", "width", "center", "profile", "omega"}, where);
        const auto amp = complex_numbers(require(s, "amplitudes", where), where + ".amplitudes");
        if (static_cast<int>(amp.size()) != m) fail(where, "need one amplitude per component");
        if (!(number(require(s, "width", where), where + ".width") > 0.0)) fail(where, "width must be positive");
        const std::string profile = s.value("profile", "constant");
        if (profile != "constant" && profile != "linear" && profile != "cosine") {
            fail(where, "profile must be constant, linear or cosine");
        }
    } else if (type == "file") {
        only_keys(s, {"type", "path"}, where);
        const auto path = resolve(base, require(s, "path", where).get<std::string>());
        const StateField f = read_field(path);
        if (!(f.grid == grid) || f.m() != m) fail(where, "field file does not match the grid or component count");
    } else {
        fail(where, "unknown type '" + type + "' (zero, gaussian, manufactured, file)");
    }
}

} // namespace

SourceSpec RunConfig::make_source(bool with_nonlinearity) const {
    const std::string type = source.at("type").get<std::string>();
    if (type == "zero") return SourceSpec::zero();
    if (type == "manufactured") {
        const PointwiseNonlinearity N = with_nonlinearity && nonlinear ? nonlinear->fn : PointwiseNonlinearity{};
        return builtin::manufactured_forcing(symbol, Phi, beta, TimeGrid{solver.T, solver.time_steps}, N, solver.dealias);
    }
    if (type == "file") {
        return SourceSpec::constant(read_field(resolve(base_dir, source.at("path").get<std::string>())));
    }
    const auto amp = complex_numbers(source.at("amplitudes"), "source.amplitudes");
    const std::vector<double> center = source.contains("center") ? numbers(source.at("center"), "source.center") : std::vector<double>{};
    const StateField G = to_frequency(builtin::gaussian(grid, amp, number(source.at("width"), "source.width"), center));
    const std::string profile = source.value("profile", "constant");
    if (profile == "constant") return SourceSpec::constant(G);
    const double omega = source.contains("omega") ? number(source.at("omega"), "source.omega") : 1.0;
    return SourceSpec::callback([G, profile, omega](double t) {
        StateField F = G;
        F.data *= profile == "linear" ? t : std::cos(omega * t);
        return F;
    });
}

std::optional<StateField> RunConfig::exact(double t) const {
    if (source.at("type").get<std::string>() != "manufactured") return std::nullopt;
    StateField u = Phi;
    u.data *= std::exp(-t);
    return u;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    only_keys(doc, {"problem", "symbol", "grid", "beta", "T", "t_out", "initial", "source", "nonlinear", "solver",
                    "output", "seed", "verify"},
              "config");
    RunConfig c;
    c.raw = doc;
    c.base_dir = std::filesystem::absolute(base_dir);
    c.problem = doc.value("problem", "unnamed");

    const json& g = require(doc, "grid", "config");
    only_keys(g, {"extent", "points", "point_cap"}, "grid");
    const auto extent = numbers(require(g, "extent", "grid"), "grid.extent");
    const json& pts = require(g, "points", "grid");
    if (!pts.is_array()) fail("grid.points", "expected an array");
    std::vector<int> points;
    for (const auto& p : pts) points.push_back(integer(p, "grid.points"));
    const std::size_t cap = g.contains("point_cap") ? static_cast<std::size_t>(integer(g.at("point_cap"), "grid.point_cap"))
                                                    : SpectralGrid::kDefaultPointCap;
    try {
        c.grid = SpectralGrid(extent, points, cap);
    } catch (const DomainError& e) {
        fail("grid", e.what());
    }

    c.symbol = parse_symbol(require(doc, "symbol", "config"), c.base_dir, c.grid.dim());

    c.beta = number(require(doc, "beta", "config"), "beta");
    if (!(c.beta > 0.0 && c.beta <= 1.0)) fail("beta", "must lie in (0, 1]");
    c.solver.T = number(require(doc, "T", "config"), "T");
    if (!(c.solver.T > 0.0)) fail("T", "must be positive");
    c.t_out = numbers(require(doc, "t_out", "config"), "t_out");
    if (c.t_out.empty()) fail("t_out", "needs at least one output time");
    for (std::size_t i = 0; i < c.t_out.size(); ++i) {
        if (!(c.t_out[i] >= 0.0 && c.t_out[i] <= c.solver.T)) fail("t_out", "time " + std::to_string(c.t_out[i]) + " outside [0, T]");
        if (i > 0 && c.t_out[i] < c.t_out[i - 1]) fail("t_out", "times must be sorted");
    }

    c.Phi = parse_initial(require(doc, "initial", "config"), c.base_dir, c.grid, c.m());
    c.source = doc.value("source", json{{"type", "zero"}});
    check_source(c.source, c.base_dir, c.grid, c.m());

    if (doc.contains("nonlinear") && !doc.at("nonlinear").is_null()) {
        const json& nl = doc.at("nonlinear");
        only_keys(nl, {"name", "coefficients", "L0"}, "nonlinear");
        try {
            c.nonlinear = builtin::nonlinearity(require(nl, "name", "nonlinear").get<std::string>(),
                                                numbers(require(nl, "coefficients", "nonlinear"), "nonlinear.coefficients"),
                                                c.m());
        } catch (const ConfigError& e) {
            fail("nonlinear", e.what());
        }
        if (nl.contains("L0")) {
            c.nonlinear->L0 = number(nl.at("L0"), "nonlinear.L0");
            if (!(c.nonlinear->L0 > 0.0)) fail("nonlinear.L0", "must be positive");
        }
    }

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        only_keys(s, {"time_steps", "picard_tol", "target_delta", "max_picard_iters", "dealias", "lipschitz_samples"}, "solver");
        if (s.contains("time_steps")) c.solver.time_steps = integer(s.at("time_steps"), "solver.time_steps");
        if (s.contains("picard_tol")) c.solver.picard_tol = number(s.at("picard_tol"), "solver.picard_tol");
        if (s.contains("target_delta")) c.solver.target_delta = number(s.at("target_delta"), "solver.target_delta");
        if (s.contains("max_picard_iters")) c.solver.max_picard_iters = integer(s.at("max_picard_iters"), "solver.max_picard_iters");
        if (s.contains("dealias")) c.solver.dealias = s.at("dealias").get<bool>();
        if (s.contains("lipschitz_samples")) c.solver.lipschitz_samples = integer(s.at("lipschitz_samples"), "solver.lipschitz_samples");
    }
    if (c.solver.time_steps < 8 || c.solver.time_steps > (1 << 20)) fail("solver.time_steps", "must lie in [8, 2^20]");
    if (!(c.solver.picard_tol > 0.0)) fail("solver.picard_tol", "must be positive");
    if (!(c.solver.target_delta > 0.0 && c.solver.target_delta < 1.0)) fail("solver.target_delta", "must lie in (0, 1)");
    if (c.solver.max_picard_iters < 1) fail("solver.max_picard_iters", "must be at least 1");
    if (c.solver.lipschitz_samples < 0) fail("solver.lipschitz_samples", "must be nonnegative");

    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) fail("seed", "expected a nonnegative integer");
        c.solver.seed = doc.at("seed").get<std::uint64_t>();
    }
    c.output = doc.value("output", std::string("mlfrac-run"));
    if (doc.contains("verify")) {
        const json& v = doc.at("verify");
        only_keys(v, {"max_discrepancy", "min_rate"}, "verify");
        if (v.contains("max_discrepancy")) c.verify.max_discrepancy = number(v.at("max_discrepancy"), "verify.max_discrepancy");
        if (v.contains("min_rate")) c.verify.min_rate = number(v.at("min_rate"), "verify.min_rate");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    const json doc = read_json(path);
    try {
        return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string config_hash(const json& doc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : doc.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace mlfrac::cli
