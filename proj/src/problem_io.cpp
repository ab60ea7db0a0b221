#include "borel/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace borel {

ParseError::ParseError(const std::string& source, int line, int column, const std::string& message)
    : InvalidProblem(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

struct Token {
    std::string text;
    int col = 1;
};

struct Line {
    int no = 0;
    std::vector<Token> tokens;
    std::string raw;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        // '=' is its own token so that "a=b", "a = b" and "a =b" read alike
        if (s[i] == '=') {
            out.push_back({"=", static_cast<int>(i) + 1});
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '#' && s[j] != '=') ++j;
        out.push_back({s.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

class Parser {
public:
    Parser(const std::string& text, std::string source) : source_(std::move(source)) {
        std::istringstream in(text);
        std::string line;
        int no = 0;
        std::string current;
        int current_line = 0;
        while (std::getline(in, line)) {
            ++no;
            auto toks = tokenize(line);
            if (toks.empty()) continue;
            if (toks.front().text.front() == '[') {
                const auto& t = toks.front();
                if (toks.size() != 1 || t.text.back() != ']' || t.text.size() < 3)
                    fail(no, t.col, "malformed section header");
                current = t.text.substr(1, t.text.size() - 2);
                static const std::set<std::string> known{"dims",   "symbol", "terms", "forcing", "initial",
                                                         "sector", "setting", "raw"};
                if (!known.count(current)) fail(no, t.col + 1, "unknown section [" + current + "]");
                if (sections_.count(current)) fail(no, t.col, "duplicate section [" + current + "]");
                sections_[current];
                section_line_[current] = no;
                current_line = no;
                continue;
            }
            if (current.empty()) fail(no, toks.front().col, "content before the first section header");
            sections_[current].push_back({no, std::move(toks), line});
        }
        (void)current_line;
    }

    [[noreturn]] void fail(int line, int col, const std::string& msg) const {
        throw ParseError(source_, line, col, msg);
    }
    [[noreturn]] void fail(const Line& l, std::size_t tok, const std::string& msg) const {
        int col = tok < l.tokens.size() ? l.tokens[tok].col : static_cast<int>(l.raw.size()) + 1;
        fail(l.no, col, msg);
    }

    bool has(const std::string& s) const { return sections_.count(s) > 0; }
    const std::vector<Line>& section(const std::string& s) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) throw ParseError(source_, 1, 1, "missing section [" + s + "]");
        return it->second;
    }

    /// key = value lines of a section; values keep their tokens.
    std::map<std::string, std::pair<const Line*, std::size_t>> keyvals(const std::string& s,
                                                                       const std::set<std::string>& allowed) const {
        std::map<std::string, std::pair<const Line*, std::size_t>> out;
        for (const auto& l : section(s)) {
            if (l.tokens.size() < 3 || l.tokens[1].text != "=") fail(l, 1, "expected 'key = value'");
            const auto& k = l.tokens[0].text;
            if (!allowed.count(k)) fail(l, 0, "unknown key '" + k + "' in [" + s + "]");
            if (out.count(k)) fail(l, 0, "duplicate key '" + k + "'");
            out[k] = {&l, 2};
        }
        return out;
    }

    int to_int(const Line& l, std::size_t i) const {
        const auto& t = l.tokens.at(i).text;
        try {
            std::size_t pos = 0;
            int v = std::stoi(t, &pos);
            if (pos == t.size()) return v;
        } catch (const std::exception&) {
        }
        fail(l, i, "expected an integer, got '" + t + "'");
    }

    double to_real(const Line& l, std::size_t i) const {
        const auto& t = l.tokens.at(i).text;
        try {
            std::size_t pos = 0;
            double v = std::stod(t, &pos);
            if (pos == t.size()) return v;
        } catch (const std::exception&) {
        }
        fail(l, i, "expected a number, got '" + t + "'");
    }

    Rational to_rat(const Line& l, std::size_t i) const {
        const auto& t = l.tokens.at(i).text;
        auto r = parse_rational(t);
        if (!r) fail(l, i, "expected an exact rational 'a' or 'a/b', got '" + t + "'");
        return *r;
    }

    /// "re,im" or "re"
    cplx to_cplx(const Line& l, std::size_t i) const {
        const auto& t = l.tokens.at(i).text;
        auto comma = t.find(',');
        try {
            if (comma == std::string::npos) {
                std::size_t pos = 0;
                double re = std::stod(t, &pos);
                if (pos == t.size()) return {re, 0.0};
            } else {
                std::string a = t.substr(0, comma), b = t.substr(comma + 1);
                std::size_t pa = 0, pb = 0;
                double re = std::stod(a, &pa), im = std::stod(b, &pb);
                if (pa == a.size() && pb == b.size()) return {re, im};
            }
        } catch (const std::exception&) {
        }
        fail(l, i, "expected a complex number 're' or 're,im', got '" + t + "'");
    }

    /// Comma-separated list that may span several tokens ("3, 2/3" or "3,2/3").
    std::vector<std::pair<std::string, int>> list_items(const Line& l, std::size_t from) const {
        std::vector<std::pair<std::string, int>> out;
        for (std::size_t i = from; i < l.tokens.size(); ++i) {
            const auto& t = l.tokens[i];
            std::size_t start = 0;
            while (start <= t.text.size()) {
                auto c = t.text.find(',', start);
                std::string piece = t.text.substr(start, c == std::string::npos ? std::string::npos : c - start);
                if (!piece.empty()) out.push_back({piece, t.col + static_cast<int>(start)});
                if (c == std::string::npos) break;
                start = c + 1;
            }
        }
        return out;
    }

    std::vector<Rational> rat_list(const Line& l, std::size_t from) const {
        std::vector<Rational> out;
        for (const auto& [s, col] : list_items(l, from)) {
            auto r = parse_rational(s);
            if (!r) fail(l.no, col, "expected an exact rational, got '" + s + "'");
            out.push_back(*r);
        }
        if (out.empty()) fail(l, from, "empty list");
        return out;
    }

    std::vector<int> int_list(const std::string& s, const Line& l, int col) const {
        std::vector<int> out;
        std::size_t start = 0;
        while (true) {
            auto c = s.find(',', start);
            std::string piece = s.substr(start, c == std::string::npos ? std::string::npos : c - start);
            try {
                std::size_t pos = 0;
                int v = std::stoi(piece, &pos);
                if (pos != piece.size()) throw std::invalid_argument(piece);
                out.push_back(v);
            } catch (const std::exception&) {
                fail(l.no, col + static_cast<int>(start), "expected an integer, got '" + piece + "'");
            }
            if (c == std::string::npos) break;
            start = c + 1;
        }
        return out;
    }

    /// Series line "re im a/b [t-degree]" added to s.
    void series_line(const Line& l, std::size_t from, RamifiedSeries& s) const {
        std::size_t n = l.tokens.size() - from;
        if (n < 3 || n > 4) fail(l, from, "series term needs 're im exponent [t-degree]'");
        double re = to_real(l, from), im = to_real(l, from + 1);
        Rational e = to_rat(l, from + 2);
        int deg = n == 4 ? to_int(l, from + 3) : 0;
        if (deg < 0 || deg > 64) fail(l, from + 3, "t-degree must lie in [0, 64]");
        TPoly c(deg + 1, cplx{});
        c[deg] = {re, im};
        s.add_relaxed(e, c);
    }

    const std::string& source() const { return source_; }
    int section_line(const std::string& s) const { return section_line_.at(s); }

private:
    std::string source_;
    std::map<std::string, std::vector<Line>> sections_;
    std::map<std::string, int> section_line_;
};

void parse_sector(const Parser& P, PDEProblem& p) {
    auto kv = P.keyvals("sector", {"phi", "rho", "directions", "horizon", "epsilon", "rho0"});
    auto get = [&](const char* k, double dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : P.to_real(*it->second.first, it->second.second);
    };
    if (!kv.count("phi")) P.fail(P.section_line("sector"), 1, "[sector] needs phi");
    p.sector.phi = get("phi", 0.0);
    p.sector.rho = get("rho", 0.0);
    p.horizon = get("horizon", 1.0);
    p.epsilon = get("epsilon", 1.0);
    p.rho0 = get("rho0", 0.0);
    if (!(p.sector.phi >= 0.0)) P.fail(*kv["phi"].first, 2, "phi must be >= 0");
    if (!(p.horizon > 0.0)) P.fail(*kv["horizon"].first, 2, "horizon must be > 0");
    if (auto it = kv.find("directions"); it != kv.end()) {
        p.sector.directions.clear();
        for (const auto& [s, col] : P.list_items(*it->second.first, 2)) {
            try {
                std::size_t pos = 0;
                p.sector.directions.push_back(std::stod(s, &pos));
                if (pos != s.size()) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                P.fail(it->second.first->no, col, "expected a ray angle, got '" + s + "'");
            }
        }
    }
}

void parse_setting(const Parser& P, PDEProblem& p) {
    auto kv = P.keyvals("setting", {"n_hat", "omega", "beta_i", "gamma_i", "beta", "setting2"});
    for (const char* k : {"n_hat", "omega", "beta_i", "gamma_i", "beta"})
        if (!kv.count(k)) P.fail(P.section_line("setting"), 1, std::string("[setting] needs ") + k);
    ScaledSetting s;
    auto line = [&](const char* k) -> const Line& { return *kv.at(k).first; };
    s.n_hat = P.to_rat(line("n_hat"), 2);
    s.omega = P.rat_list(line("omega"), 2);
    s.beta_i = P.rat_list(line("beta_i"), 2);
    s.gamma_i = P.rat_list(line("gamma_i"), 2);
    s.beta = P.to_rat(line("beta"), 2);
    if (kv.count("setting2")) {
        const auto& t = line("setting2").tokens.at(2).text;
        if (t != "true" && t != "false") P.fail(line("setting2"), 2, "setting2 must be true or false");
        s.setting2 = t == "true";
    }
    p.setting = s;
}

RawEquation parse_raw(const Parser& P) {
    RawEquation raw;
    bool have_n = false;
    const auto& lines = P.section("raw");
    // n first: it fixes the slot layout
    for (const auto& l : lines)
        if (l.tokens[0].text == "n") {
            if (l.tokens.size() != 3 || l.tokens[1].text != "=") P.fail(l, 1, "expected 'n = <order>'");
            raw.n = P.to_int(l, 2);
            have_n = true;
        }
    if (!have_n) P.fail(P.section_line("raw"), 1, "[raw] needs 'n = <order>'");
    if (raw.n < 2 || raw.n > 8) P.fail(P.section_line("raw"), 1, "raw order n must lie in [2, 8]");
    const int nv = raw.nvars();
    raw.g1 = ExactPoly(nv);
    raw.g2 = ExactPoly(nv);
    raw.initial = ExactPoly(nv);
    for (const auto& l : lines) {
        const auto& head = l.tokens[0].text;
        if (head == "n") continue;
        if (head == "symbol") {
            // symbol <j> = <rational>
            if (l.tokens.size() != 4 || l.tokens[2].text != "=") P.fail(l, 1, "expected 'symbol <j> = <coefficient>'");
            int j = P.to_int(l, 1);
            if (j < 0 || j > raw.n) P.fail(l, 1, "symbol order out of range");
            raw.symbol[j] = P.to_rat(l, 3);
            continue;
        }
        if (head != "g1" && head != "g2" && head != "initial")
            P.fail(l, 0, "unknown [raw] entry '" + head + "' (expected n, symbol, g1, g2, initial)");
        if (l.tokens.size() < 2) P.fail(l, 1, "missing coefficient");
        ExactPoly::Exps e(nv, Rational(0));
        Rational c = P.to_rat(l, 1);
        for (std::size_t i = 2; i < l.tokens.size(); i += 3) {
            if (i + 2 >= l.tokens.size() || l.tokens[i + 1].text != "=") P.fail(l, i, "expected 'var = exponent'");
            const auto& v = l.tokens[i].text;
            int slot = -1;
            if (v == "x")
                slot = RawEquation::x_slot();
            else if (v == "t")
                slot = RawEquation::t_slot();
            else if (v.size() > 1 && v[0] == 'u') {
                int j = -1;
                try {
                    j = std::stoi(v.substr(1));
                } catch (const std::exception&) {
                }
                if (j < 0 || j >= 2 * raw.n) P.fail(l, i, "derivative slot '" + v + "' out of range");
                slot = RawEquation::u_slot(j);
            } else {
                P.fail(l, i, "unknown variable '" + v + "' (x, t, u0, u1, ...)");
            }
            e[slot] += P.to_rat(l, i + 2);
        }
        if (head == "g1")
            raw.g1.add_term(e, c);
        else if (head == "g2")
            raw.g2.add_term(e, c);
        else
            raw.initial.add_term(e, c);
    }
    return raw;
}

void fill_derived(PDEProblem& p) {
    int ram = 1;
    for (const auto& s : p.forcing) ram = std::lcm(ram, s.ramification());
    for (const auto& s : p.initial) ram = std::lcm(ram, s.ramification());
    for (const auto& t : p.terms) ram = std::lcm(ram, t.coeff.ramification());
    if (p.ramification.empty()) p.ramification = {1};
    p.ramification[0] = std::lcm(p.ramification[0], ram);
    p.alpha_r = data_decay(p);
    p.alpha_q.clear();
    if (p.setting) {
        p.alpha_q = derive_alpha_table(p);
    } else {
        for (const auto& t : p.terms) {
            auto& al = p.alpha_q[t.q_key()];
            Rational a = t.coeff.min_exponent();
            if (al.empty() || a < al.front()) al = {a};
        }
    }
}

}  // namespace

ParsedProblem parse_problem_text(const std::string& text, const std::string& source) {
    Parser P(text, source);
    ParsedProblem out;
    PDEProblem& p = out.problem;

    if (P.has("raw")) {
        for (const char* s : {"symbol", "terms", "forcing", "initial"})
            if (P.has(s)) P.fail(P.section_line(s), 1, std::string("[") + s + "] cannot be combined with [raw]");
        RawEquation raw = parse_raw(P);
        PDEProblem tmp;
        parse_sector(P, tmp);
        raw.sector = tmp.sector;
        raw.horizon = tmp.horizon;
        raw.epsilon = tmp.epsilon;
        raw.rho0 = tmp.rho0;
        p = normalize(raw);
        p.sector = tmp.sector;
        p.horizon = tmp.horizon;
        p.epsilon = tmp.epsilon;
        p.rho0 = tmp.rho0;
        if (P.has("dims"))
            for (const auto& l : P.section("dims"))
                if (l.tokens.size() >= 3 && l.tokens[0].text == "name") p.name = l.tokens[2].text;
        if (P.has("setting")) parse_setting(P, p);
        fill_derived(p);
        out.from_raw = true;
        out.raw = raw;
        return out;
    }

    auto kv = P.keyvals("dims", {"name", "d", "n", "m", "ramification"});
    for (const char* k : {"d", "n", "m"})
        if (!kv.count(k)) P.fail(P.section_line("dims"), 1, std::string("[dims] needs ") + k);
    p.d = P.to_int(*kv["d"].first, 2);
    p.n = P.to_int(*kv["n"].first, 2);
    p.m = P.to_int(*kv["m"].first, 2);
    if (p.d < 1) P.fail(*kv["d"].first, 2, "d must be >= 1");
    if (p.n < 2) P.fail(*kv["n"].first, 2, "order n must be > 1");
    if (p.m < 1) P.fail(*kv["m"].first, 2, "m must be >= 1");
    p.ramification = {kv.count("ramification") ? P.to_int(*kv["ramification"].first, 2) : 1};
    if (p.ramification[0] < 1) P.fail(*kv["ramification"].first, 2, "ramification must be >= 1");
    if (kv.count("name")) p.name = kv["name"].first->tokens.at(2).text;
    p.sector.d = p.d;

    auto component = [&](const Line& l, std::size_t i) {
        int c = P.to_int(l, i);
        if (c < 0 || c >= p.m) P.fail(l, i, "component index out of range [0, m)");
        return c;
    };
    auto multi_index = [&](const Line& l, std::size_t i) {
        MultiIndex mi{P.int_list(l.tokens.at(i).text, l, l.tokens[i].col)};
        if (static_cast<int>(mi.entries.size()) != p.d) P.fail(l, i, "multi-index needs d entries");
        for (int e : mi.entries)
            if (e < 0) P.fail(l, i, "multi-index entries must be >= 0");
        return mi;
    };

    p.symbol.n = p.n;
    p.symbol.coeffs.assign(p.m, {});
    for (const auto& l : P.section("symbol")) {
        // <component> <multi-index> <coefficient>
        if (l.tokens.size() != 3) P.fail(l, 0, "symbol line needs '<component> <j> <re[,im]>'");
        int c = component(l, 0);
        MultiIndex mi = multi_index(l, 1);
        if (mi.abs() > p.n) P.fail(l, 1, "symbol degree exceeds n");
        p.symbol.coeffs[c][mi] += P.to_cplx(l, 2);
    }

    auto read_series = [&](const char* name, std::vector<RamifiedSeries>& dst) {
        dst.assign(p.m, RamifiedSeries(Side::x, p.ramification[0]));
        if (!P.has(name)) return;
        for (const auto& l : P.section(name)) {
            if (l.tokens.size() < 4) P.fail(l, 0, "expected '<component> re im exponent [t-degree]'");
            P.series_line(l, 1, dst[component(l, 0)]);
        }
    };
    read_series("forcing", p.forcing);
    read_series("initial", p.initial);

    if (P.has("terms")) {
        NonlinearTerm* cur = nullptr;
        for (const auto& l : P.section("terms")) {
            if (l.tokens[0].text == "term") {
                NonlinearTerm t;
                t.coeff = RamifiedSeries(Side::x, p.ramification[0]);
                t.k.assign(p.m, 0);
                for (std::size_t i = 1; i < l.tokens.size(); i += 3) {
                    if (i + 2 >= l.tokens.size() || l.tokens[i + 1].text != "=")
                        P.fail(l, i, "expected 'component = c', 'k = k1,..' or 'q = l:j:power'");
                    const auto& key = l.tokens[i].text;
                    const auto& val = l.tokens[i + 2];
                    if (key == "component") {
                        t.component = component(l, i + 2);
                    } else if (key == "k") {
                        t.k = P.int_list(val.text, l, val.col);
                        if (static_cast<int>(t.k.size()) != p.m) P.fail(l, i + 2, "k needs m entries");
                        for (int v : t.k)
                            if (v < 0) P.fail(l, i + 2, "k entries must be >= 0");
                    } else if (key == "q") {
                        if (val.text == "none") continue;
                        // factors separated by ';', each l:j1,j2,..:power
                        std::size_t start = 0;
                        while (start < val.text.size()) {
                            auto semi = val.text.find(';', start);
                            std::string f = val.text.substr(start, semi == std::string::npos ? std::string::npos
                                                                                         : semi - start);
                            int col = val.col + static_cast<int>(start);
                            auto c1 = f.find(':'), c2 = f.rfind(':');
                            if (c1 == std::string::npos || c1 == c2)
                                P.fail(l.no, col, "q factor must read l:j:power");
                            QFactor qf;
                            qf.l = P.int_list(f.substr(0, c1), l, col).at(0);
                            qf.j.entries = P.int_list(f.substr(c1 + 1, c2 - c1 - 1), l, col + static_cast<int>(c1) + 1);
                            qf.power = P.int_list(f.substr(c2 + 1), l, col + static_cast<int>(c2) + 1).at(0);
                            if (qf.l < 0 || qf.l >= p.m) P.fail(l.no, col, "q factor component out of range");
                            if (static_cast<int>(qf.j.entries.size()) != p.d)
                                P.fail(l.no, col, "q factor multi-index needs d entries");
                            if (qf.power < 1) P.fail(l.no, col, "q factor power must be >= 1");
                            t.q.push_back(qf);
                            if (semi == std::string::npos) break;
                            start = semi + 1;
                        }
                    } else {
                        P.fail(l, i, "unknown term attribute '" + key + "'");
                    }
                }
                p.terms.push_back(std::move(t));
                cur = &p.terms.back();
                continue;
            }
            if (!cur) P.fail(l, 0, "coefficient line before the first 'term' header");
            P.series_line(l, 0, cur->coeff);
        }
        for (const auto& t : p.terms)
            if (t.coeff.empty()) P.fail(P.section_line("terms"), 1, "term " + t.label() + " has no coefficient");
    }

    parse_sector(P, p);
    if (P.has("setting")) parse_setting(P, p);
    fill_derived(p);
    return out;
}

ParsedProblem parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidProblem("cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str(), path);
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string mi_text(const MultiIndex& m) {
    std::string s;
    for (std::size_t i = 0; i < m.entries.size(); ++i) s += (i ? "," : "") + std::to_string(m.entries[i]);
    return s;
}

void write_series(std::ostream& out, const RamifiedSeries& s, const std::string& prefix) {
    for (const auto& [e, c] : s.terms())
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] == cplx{}) continue;
            out << prefix << num(c[k].real()) << ' ' << num(c[k].imag()) << ' ' << to_string(e);
            if (k > 0) out << ' ' << k;
            out << '\n';
        }
}

std::string rat_list(const std::vector<Rational>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s;
}

}  // namespace

void write_problem(std::ostream& out, const PDEProblem& p) {
    out << "[dims]\n";
    if (!p.name.empty()) out << "name = " << p.name << '\n';
    out << "d = " << p.d << "\nn = " << p.n << "\nm = " << p.m << '\n';
    out << "ramification = " << (p.ramification.empty() ? 1 : p.ramification[0]) << "\n\n";
    out << "[symbol]\n";
    for (std::size_t c = 0; c < p.symbol.coeffs.size(); ++c)
        for (const auto& [mi, v] : p.symbol.coeffs[c])
            out << c << ' ' << mi_text(mi) << ' ' << num(v.real()) << ',' << num(v.imag()) << '\n';
    auto comp_series = [&](const char* name, const std::vector<RamifiedSeries>& v) {
        out << "\n[" << name << "]\n";
        for (std::size_t c = 0; c < v.size(); ++c) write_series(out, v[c], std::to_string(c) + ' ');
    };
    comp_series("forcing", p.forcing);
    comp_series("initial", p.initial);
    out << "\n[terms]\n";
    for (const auto& t : p.terms) {
        out << "term component = " << t.component << " k = ";
        for (std::size_t i = 0; i < t.k.size(); ++i) out << (i ? "," : "") << t.k[i];
        out << " q = " << t.q_key() << '\n';
        write_series(out, t.coeff, "  ");
    }
    out << "\n[sector]\nphi = " << num(p.sector.phi) << "\nrho = " << num(p.sector.rho) << "\ndirections = ";
    for (std::size_t i = 0; i < p.sector.directions.size(); ++i) out << (i ? ", " : "") << num(p.sector.directions[i]);
    out << "\nhorizon = " << num(p.horizon) << "\nepsilon = " << num(p.epsilon) << "\nrho0 = " << num(p.rho0) << '\n';
    if (p.setting) {
        const auto& s = *p.setting;
        out << "\n[setting]\nn_hat = " << to_string(s.n_hat) << "\nomega = " << rat_list(s.omega)
            << "\nbeta_i = " << rat_list(s.beta_i) << "\ngamma_i = " << rat_list(s.gamma_i)
            << "\nbeta = " << to_string(s.beta) << "\nsetting2 = " << (s.setting2 ? "true" : "false") << '\n';
    }
}

}  // namespace borel
