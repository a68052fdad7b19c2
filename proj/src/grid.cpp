#include "achlab/grid.hpp"

#include <fstream>
#include <sstream>

namespace ach {

std::string grid_header_line(const TorusGrid& g, int m, const char* count_key) {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << g.n << " shape=";
    for (int k = 0; k < g.n; ++k) os << (k ? "," : "") << g.shape[k];
    os << " lengths=";
    for (int k = 0; k < g.n; ++k) os << (k ? "," : "") << g.lengths[k];
    os << " " << count_key << "=" << m;
    return os.str();
}

void parse_grid_header(const std::string& line, TorusGrid& g, int& m) {
    std::istringstream is(line);
    std::string tok;
    g = TorusGrid();
    m = -1;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw IoError("bad snapshot header token: " + tok);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        auto split = [&](std::array<double, 2>& out) {
            std::istringstream vs(val);
            std::string piece;
            int k = 0;
            while (std::getline(vs, piece, ',') && k < 2) out[k++] = std::stod(piece);
            return k;
        };
        if (key == "n") g.n = std::stoi(val);
        else if (key == "m" || key == "N") m = std::stoi(val);
        else if (key == "shape") {
            std::array<double, 2> s{8, 1};
            split(s);
            g.shape = {(int)s[0], (int)s[1]};
        } else if (key == "lengths") {
            std::array<double, 2> L{1, 1};
            split(L);
            g.lengths = {L[0], L[1]};
        }
    }
    if (g.n == 1) {
        g.shape[1] = 1;
        g.lengths[1] = 1.0;
    }
    if (m <= 0) throw IoError("snapshot header missing m/N");
    g.validate();
}

std::string field_to_text(const Field& f) {
    std::ostringstream os;
    os.precision(17);
    os << "ACHF 1\n" << grid_header_line(f.grid, f.m, "m") << "\n";
    for (std::size_t i = 0; i < f.v.size(); ++i)
        os << f.v[i] << ((i + 1) % 8 == 0 ? "\n" : " ");
    os << "\n";
    return os.str();
}

Field field_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string magic, line;
    std::getline(is, magic);
    if (magic.rfind("ACHF 1", 0) != 0) throw IoError("not an ACHF snapshot");
    std::getline(is, line);
    TorusGrid g;
    int m;
    parse_grid_header(line, g, m);
    Field f(g, m);
    for (double& x : f.v)
        if (!(is >> x)) throw IoError("truncated ACHF snapshot");
    return f;
}

void save_field(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << field_to_text(f);
}

Field load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return field_from_text(os.str());
}

ConformalMetric metric_from_expr(const TorusGrid& g, const std::string& expr) {
    if (expr.empty() || expr == "1" || expr == "flat") return ConformalMetric::flat(g);
    if (expr.rfind("bump:", 0) == 0) {
        std::istringstream is(expr.substr(5));
        std::string piece;
        double A = 0, x0 = 0, y0 = 0;
        if (std::getline(is, piece, ',')) A = std::stod(piece);
        if (std::getline(is, piece, ',')) x0 = std::stod(piece);
        if (std::getline(is, piece, ',')) y0 = std::stod(piece);
        double Lx = g.lengths[0], Ly = g.lengths[1];
        int n = g.n;
        return ConformalMetric::from_rho(g, [=](double x, double y) {
            double r = 1.0 + A * std::cos(2 * M_PI * (x - x0) / Lx) *
                                 (n == 2 ? std::cos(2 * M_PI * (y - y0) / Ly) : 1.0);
            return r;
        });
    }
    throw ConfigError("unknown rho expression: " + expr);
}

}  // namespace ach
