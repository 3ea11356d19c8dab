#include "scarlab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace scarlab {

namespace {

[[noreturn]] void bad(int line, const std::string& msg) {
    fail(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + msg);
}

struct RawValue {
    enum class Kind { Number, String, Boolean, NumberList, StringList };
    Kind kind = Kind::Number;
    double num = 0.0;
    bool flag = false;
    std::string str;
    std::vector<double> nums;
    std::vector<std::string> strs;
    int line = 0;
    mutable bool used = false;
};

struct RawSection {
    int line = 0;
    mutable bool used = false;
    std::map<std::string, RawValue> keys;
};

using RawConfig = std::map<std::string, RawSection>;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

double parse_number(const std::string& tok, int line) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') bad(line, "expected a number, got '" + tok + "'");
    if (!std::isfinite(v)) bad(line, "number out of range: '" + tok + "'");
    return v;
}

std::string parse_quoted(const std::string& tok, int line) {
    if (tok.size() < 2 || tok.front() != '"' || tok.back() != '"')
        bad(line, "malformed string literal");
    std::string out;
    for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
        if (tok[i] == '\\') {
            ++i;
            if (i + 1 >= tok.size() || (tok[i] != '"' && tok[i] != '\\'))
                bad(line, "unsupported escape in string literal");
        }
        out.push_back(tok[i]);
    }
    return out;
}

std::vector<std::string> split_top_level(const std::string& inner, int line) {
    std::vector<std::string> parts;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        char c = inner[i];
        if (c == '"' && (i == 0 || inner[i - 1] != '\\')) quoted = !quoted;
        if (c == ',' && !quoted) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) bad(line, "unterminated string in array");
    std::string last = trim(cur);
    if (!last.empty()) parts.push_back(last);
    else if (!parts.empty()) bad(line, "trailing comma in array");
    return parts;
}

RawValue parse_value(const std::string& raw, int line) {
    std::string tok = trim(raw);
    if (tok.empty()) bad(line, "missing value");
    RawValue v;
    v.line = line;
    if (tok == "true" || tok == "false") {
        v.kind = RawValue::Kind::Boolean;
        v.flag = tok == "true";
        return v;
    }
    if (tok.front() == '"') {
        v.kind = RawValue::Kind::String;
        v.str = parse_quoted(tok, line);
        return v;
    }
    if (tok.front() == '[') {
        if (tok.back() != ']') bad(line, "arrays must open and close on one line");
        const std::vector<std::string> parts = split_top_level(tok.substr(1, tok.size() - 2), line);
        if (!parts.empty() && parts.front().front() == '"') {
            v.kind = RawValue::Kind::StringList;
            for (const std::string& p : parts) v.strs.push_back(parse_quoted(p, line));
        } else {
            v.kind = RawValue::Kind::NumberList;
            for (const std::string& p : parts) v.nums.push_back(parse_number(p, line));
        }
        return v;
    }
    v.kind = RawValue::Kind::Number;
    v.num = parse_number(tok, line);
    return v;
}

RawConfig parse_raw(const std::string& text) {
    RawConfig cfg;
    std::string current;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') bad(line_no, "malformed section header");
            std::string name = trim(s.substr(1, s.size() - 2));
            if (!valid_key(name)) bad(line_no, "malformed section name");
            if (cfg.count(name)) bad(line_no, "duplicate section [" + name + "]");
            cfg[name].line = line_no;
            current = name;
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) bad(line_no, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        if (!valid_key(key)) bad(line_no, "malformed key '" + key + "'");
        if (current.empty()) bad(line_no, "key outside any [section]");
        RawSection& sec = cfg[current];
        if (sec.keys.count(key)) bad(line_no, "duplicate key '" + key + "'");
        sec.keys[key] = parse_value(s.substr(eq + 1), line_no);
    }
    return cfg;
}

class Block {
public:
    Block(const RawConfig& cfg, const std::string& name) : name_(name) {
        auto it = cfg.find(name);
        sec_ = it == cfg.end() ? nullptr : &it->second;
        if (sec_) sec_->used = true;
    }

    bool present() const { return sec_ != nullptr; }

    const RawValue* find(const std::string& key) const {
        if (!sec_) return nullptr;
        auto it = sec_->keys.find(key);
        if (it == sec_->keys.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    bool has(const std::string& key) const { return find(key) != nullptr; }

    double number(const std::string& key, double def) const {
        const RawValue* v = find(key);
        if (!v) return def;
        if (v->kind != RawValue::Kind::Number) bad(v->line, "'" + key + "' must be a number");
        return v->num;
    }

    int integer(const std::string& key, int def) const {
        const RawValue* v = find(key);
        if (!v) return def;
        if (v->kind != RawValue::Kind::Number || v->num != std::floor(v->num) ||
            std::abs(v->num) > 2147483647.0)
            bad(v->line, "'" + key + "' must be an integer");
        return static_cast<int>(v->num);
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) const {
        const RawValue* v = find(key);
        if (!v) return def;
        if (v->kind != RawValue::Kind::Number || v->num != std::floor(v->num) || v->num < 0.0 ||
            v->num > 9007199254740992.0)
            bad(v->line, "'" + key + "' must be a non-negative integer");
        return static_cast<std::uint64_t>(v->num);
    }

    std::string str(const std::string& key, const std::string& def) const {
        const RawValue* v = find(key);
        if (!v) return def;
        if (v->kind != RawValue::Kind::String) bad(v->line, "'" + key + "' must be a string");
        return v->str;
    }

    std::vector<double> numbers(const std::string& key) const {
        const RawValue* v = find(key);
        if (!v) return {};
        if (v->kind != RawValue::Kind::NumberList)
            bad(v->line, "'" + key + "' must be an array of numbers");
        if (v->nums.empty()) bad(v->line, "'" + key + "' must not be empty");
        return v->nums;
    }

    std::vector<std::string> strings(const std::string& key) const {
        const RawValue* v = find(key);
        if (!v) return {};
        if (v->kind != RawValue::Kind::StringList)
            bad(v->line, "'" + key + "' must be an array of strings");
        if (v->strs.empty()) bad(v->line, "'" + key + "' must not be empty");
        return v->strs;
    }

    int line(const std::string& key) const {
        const RawValue* v = find(key);
        return v ? v->line : (sec_ ? sec_->line : 0);
    }

private:
    const RawSection* sec_ = nullptr;
    std::string name_;
};

ResonanceLabel parse_resonance(const std::string& tok, int line) {
    std::size_t colon = tok.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        bad(line, "resonances must look like \"v_theta:v_r\", got '" + tok + "'");
    auto to_int = [&](const std::string& part) {
        char* end = nullptr;
        long v = std::strtol(part.c_str(), &end, 10);
        if (end == part.c_str() || *end != '\0' || v < 1 || v > 1000)
            bad(line, "resonance indices must be small positive integers: '" + tok + "'");
        return static_cast<int>(v);
    };
    return ResonanceLabel(to_int(tok.substr(0, colon)), to_int(tok.substr(colon + 1)));
}

}  // namespace

std::vector<double> FieldBlock::values() const {
    if (!sweep) return {b};
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(start + i * step);
    return out;
}

SolverConfig SolverBlock::solver() const {
    SolverConfig cfg;
    cfg.k = num_states;
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    cfg.seed = seed;
    cfg.extra_states = extra_states;
    for (double d = dtau_start; d > dtau_min; d *= 0.5) cfg.dtau_schedule.push_back(d);
    return cfg;
}

EnsembleKind StatsBlock::resolve(double b) const {
    if (ensemble == "goe") return EnsembleKind::GOE;
    if (ensemble == "gue") return EnsembleKind::GUE;
    return b != 0.0 ? EnsembleKind::GUE : EnsembleKind::GOE;
}

UnfoldMethod StatsBlock::method_for(const std::string& source, double well_exponent) const {
    if (unfold == "polynomial") return UnfoldMethod::polynomial();
    if (unfold == "thomas-fermi") return UnfoldMethod::thomas_fermi(well_exponent);
    return source.rfind("synthetic:", 0) == 0 ? UnfoldMethod::polynomial()
                                              : UnfoldMethod::thomas_fermi(well_exponent);
}

RunConfig RunConfig::from_text(const std::string& text) {
    RawConfig raw = parse_raw(text);
    RunConfig rc;
    rc.text = text;

    {
        Block pot(raw, "potential");
        rc.potential.n = pot.number("n", rc.potential.n);
        rc.potential.omega0 = pot.number("omega0", rc.potential.omega0);
    }
    {
        Block bumps(raw, "bumps");
        rc.potential.M = bumps.number("M", 0.0);
        rc.potential.sigma = bumps.number("sigma", 0.1);
        rc.potential.density = bumps.number("density", 2.0);
        rc.potential.seed = bumps.unsigned_integer("seed", 1);
    }
    rc.potential.validate();

    {
        Block field(raw, "field");
        const bool has_b = field.has("B");
        const bool has_start = field.has("start");
        const bool has_stop = field.has("stop");
        const bool has_step = field.has("step");
        if (has_b && (has_start || has_stop || has_step))
            bad(field.line("B"), "give a scalar B or a start/stop/step sweep, not both");
        if (has_start || has_stop || has_step) {
            if (!(has_start && has_stop && has_step))
                bad(field.line("start"), "a field sweep needs start, stop, and step");
            rc.field.sweep = true;
            rc.field.start = field.number("start", 0.0);
            rc.field.stop = field.number("stop", 0.0);
            rc.field.step = field.number("step", 0.0);
            if (rc.field.step <= 0.0) bad(field.line("step"), "sweep step must be positive");
            if (rc.field.stop < rc.field.start)
                bad(field.line("stop"), "sweep stop must not precede start");
        } else {
            rc.field.b = field.number("B", 0.0);
        }
    }

    {
        Block solver(raw, "solver");
        rc.solver.grid = solver.integer("grid", rc.solver.grid);
        rc.solver.extent = solver.number("extent", rc.solver.extent);
        rc.solver.num_states = solver.integer("num_states", rc.solver.num_states);
        rc.solver.tol = solver.number("tol", rc.solver.tol);
        rc.solver.max_iters = solver.integer("max_iters", rc.solver.max_iters);
        rc.solver.seed = solver.unsigned_integer("seed", rc.solver.seed);
        rc.solver.dtau_start = solver.number("dtau_start", rc.solver.dtau_start);
        rc.solver.dtau_min = solver.number("dtau_min", rc.solver.dtau_min);
        rc.solver.extra_states = solver.integer("extra_states", rc.solver.extra_states);
        if (!is_pow2(rc.solver.grid))
            bad(solver.line("grid"), "grid must be a power of two");
        if (rc.solver.extent <= 0.0) bad(solver.line("extent"), "extent must be positive");
        if (!(rc.solver.dtau_start > rc.solver.dtau_min && rc.solver.dtau_min > 0.0))
            bad(solver.line("dtau_min"), "need dtau_start > dtau_min > 0");
        rc.solver.make_grid();
        rc.solver.solver().validate();
    }

    {
        Block stats(raw, "stats");
        rc.stats.ensemble = stats.str("ensemble", rc.stats.ensemble);
        rc.stats.l_max = stats.number("L_max", rc.stats.l_max);
        rc.stats.bins = stats.integer("bins", rc.stats.bins);
        rc.stats.unfold = stats.str("unfold", rc.stats.unfold);
        if (rc.stats.ensemble != "auto" && rc.stats.ensemble != "goe" &&
            rc.stats.ensemble != "gue")
            bad(stats.line("ensemble"), "ensemble must be auto, goe, or gue");
        if (!(rc.stats.l_max > 0.0 && rc.stats.l_max <= 30.0))
            bad(stats.line("L_max"), "L_max must lie in (0, 30]");
        if (rc.stats.bins < 8) bad(stats.line("bins"), "need at least 8 histogram bins");
        if (rc.stats.unfold != "auto" && rc.stats.unfold != "thomas-fermi" &&
            rc.stats.unfold != "polynomial")
            bad(stats.line("unfold"), "unfold must be auto, thomas-fermi, or polynomial");
        if (!rc.field.sweep) {
            if (rc.stats.ensemble == "goe" && rc.field.b != 0.0)
                bad(stats.line("ensemble"), "goe statistics assume zero field, but B is set");
            if (rc.stats.ensemble == "gue" && rc.field.b == 0.0)
                bad(stats.line("ensemble"), "gue statistics need a nonzero field");
        }
    }

    {
        Block sweep(raw, "sweep");
        rc.sweep.present = sweep.present();
        rc.sweep.m_values = sweep.numbers("M");
        if (rc.sweep.m_values.empty()) rc.sweep.m_values = {rc.potential.M};
        rc.sweep.sigma_values = sweep.numbers("sigma");
        if (rc.sweep.sigma_values.empty()) rc.sweep.sigma_values = {rc.potential.sigma};
        for (double m : rc.sweep.m_values)
            if (m < 0.0) bad(sweep.line("M"), "bump amplitudes must be non-negative");
        for (double s : rc.sweep.sigma_values)
            if (s <= 0.0) bad(sweep.line("sigma"), "bump widths must be positive");
        std::vector<double> seeds = sweep.numbers("seeds");
        if (seeds.empty()) {
            rc.sweep.seeds = {rc.potential.seed};
        } else {
            for (double s : seeds) {
                if (s != std::floor(s) || s < 0.0)
                    bad(sweep.line("seeds"), "seeds must be non-negative integers");
                rc.sweep.seeds.push_back(static_cast<std::uint64_t>(s));
            }
        }
    }

    {
        Block subspec(raw, "subspec");
        rc.subspec.state = subspec.integer("state", rc.subspec.state);
        rc.subspec.window = subspec.number("window", rc.subspec.window);
        rc.subspec.k_max = subspec.integer("k_max", rc.subspec.k_max);
        if (rc.subspec.state < 0) bad(subspec.line("state"), "state index must be non-negative");
        if (rc.subspec.window <= 0.0) bad(subspec.line("window"), "window must be positive");
        if (rc.subspec.k_max < 0) bad(subspec.line("k_max"), "k_max must be non-negative");
        std::vector<std::string> res = subspec.strings("resonances");
        if (!res.empty()) {
            rc.subspec.resonances.clear();
            for (const std::string& tok : res)
                rc.subspec.resonances.push_back(parse_resonance(tok, subspec.line("resonances")));
        }
    }

    {
        Block dos(raw, "dos");
        DOSAxes& ax = rc.dos.axes;
        ax.b_start = dos.number("b_start", ax.b_start);
        ax.b_stop = dos.number("b_stop", ax.b_stop);
        ax.b_step = dos.number("b_step", ax.b_step);
        ax.e_start = dos.number("e_start", ax.e_start);
        ax.e_stop = dos.number("e_stop", ax.e_stop);
        ax.e_step = dos.number("e_step", ax.e_step);
        ax.window = dos.number("window", ax.window);
        if (ax.b_step <= 0.0 || ax.e_step <= 0.0)
            bad(dos.line("b_step"), "axis steps must be positive");
        if (ax.b_stop < ax.b_start || ax.e_stop <= ax.e_start)
            bad(dos.line("b_stop"), "axis ranges must be non-degenerate");
        if (ax.window <= 0.0) bad(dos.line("window"), "window must be positive");
    }

    for (const auto& [name, sec] : raw) {
        if (!sec.used) bad(sec.line, "unknown section [" + name + "]");
        for (const auto& [key, value] : sec.keys)
            if (!value.used) bad(value.line, "unknown key '" + key + "' in [" + name + "]");
    }
    return rc;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) fail(ErrorCode::IoError, "cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_text(text);
}

}  // namespace scarlab
