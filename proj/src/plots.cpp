#include "ergoscope/error.hpp"
#include "ergoscope/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace ergoscope {

namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<double>>;

Table read_csv(const fs::path& p, std::size_t columns) {
    std::ifstream f(p);
    if (!f) fail(ErrorKind::IoError, "cannot read " + p.string());
    Table rows;
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != columns) fail(ErrorKind::IoError, "malformed row in " + p.string() + ": " + line);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Fixed 640x400 canvas with a 60 px margin and linear axes.
class Svg {
public:
    Svg(double x0, double x1, double y0, double y1, std::string title) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
        if (x1_ <= x0_) x1_ = x0_ + 1;
        if (y1_ <= y0_) y1_ = y0_ + 1;
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
                "font-size=\"11\">\n<rect width=\"640\" height=\"400\" fill=\"white\"/>\n"
             << "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n"
             << "<rect x=\"60\" y=\"40\" width=\"540\" height=\"300\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            double xv = x0_ + (x1_ - x0_) * k / 4, yv = y0_ + (y1_ - y0_) * k / 4;
            out_ << "<text x=\"" << fmt(px(xv)) << "\" y=\"356\" text-anchor=\"middle\">" << tick(xv) << "</text>\n"
                 << "<text x=\"54\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
        }
    }
    double px(double x) const { return 60 + 540 * (x - x0_) / (x1_ - x0_); }
    double py(double y) const { return 340 - 300 * (y - y0_) / (y1_ - y0_); }

    void polyline(const std::vector<std::pair<double, double>>& pts, const char* color, const char* dash = nullptr) {
        if (pts.empty()) return;
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dash) out_ << " stroke-dasharray=\"" << dash << "\"";
        out_ << " points=\"";
        for (const auto& [x, y] : pts) out_ << fmt(px(x)) << "," << fmt(py(y)) << " ";
        out_ << "\"/>\n";
    }
    void stem(double x, double y, const char* color) {
        out_ << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(x)) << "\" y2=\""
             << fmt(py(y)) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        dot(x, y, color);
    }
    void dot(double x, double y, const char* color, double r = 3) {
        out_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << r << "\" fill=\"" << color
             << "\"/>\n";
    }
    void ring(double x, double y, const char* color) {
        out_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"5\" fill=\"none\" stroke=\""
             << color << "\" stroke-width=\"1.5\"/>\n";
    }
    void legend(int slot, const char* color, const std::string& label) {
        double y = 56 + 14 * slot;
        out_ << "<rect x=\"470\" y=\"" << y - 8 << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n"
             << "<text x=\"486\" y=\"" << y + 1 << "\">" << label << "</text>\n";
    }
    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    double x0_, x1_, y0_, y1_;
    std::ostringstream out_;
};

using Key = std::pair<int, int>;  // (n, i)

std::map<Key, std::vector<std::pair<double, double>>> group(const Table& t) {
    std::map<Key, std::vector<std::pair<double, double>>> g;
    for (const auto& r : t) g[{static_cast<int>(r[0]), static_cast<int>(r[1])}].push_back({r[2], r[3]});
    return g;
}

void write(const fs::path& p, const std::string& text, std::vector<std::string>& written) {
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot write " + p.string());
    f << text;
    written.push_back(p.string());
}

// Step function from density nodes: value holds on [x_k, x_{k+1}).
std::vector<std::pair<double, double>> steps(const std::vector<std::pair<double, double>>& nodes) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        pts.push_back({nodes[k].first, nodes[k].second});
        pts.push_back({nodes[k + 1].first, nodes[k].second});
    }
    return pts;
}

void density_plots(const fs::path& dir, const fs::path& out, std::vector<std::string>& written) {
    auto emp = group(read_csv(dir / "density.csv", 4));
    auto orc = group(read_csv(dir / "oracle_density.csv", 4));
    for (const auto& [key, nodes] : emp) {
        const auto& o = orc[key];
        double x0 = 1e300, x1 = -1e300, y1 = 0;
        for (const auto* v : {&nodes, &o})
            for (const auto& [x, y] : *v) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        Svg svg(x0, x1, 0, y1 * 1.05,
                "conditional density, n=" + std::to_string(key.first) + ", i=" + std::to_string(key.second));
        svg.polyline(steps(nodes), "#1f77b4");
        svg.polyline(o, "#d62728", "5,3");
        svg.legend(0, "#1f77b4", "exact pushforward");
        svg.legend(1, "#d62728", "predicted");
        write(out / ("density_n" + std::to_string(key.first) + "_i" + std::to_string(key.second) + ".svg"),
              svg.finish(), written);
    }
}

void atom_plots(const fs::path& dir, const fs::path& out, std::vector<std::string>& written) {
    auto emp = group(read_csv(dir / "atoms.csv", 4));
    auto orc = group(read_csv(dir / "oracle_atoms.csv", 4));
    for (const auto& [key, atoms] : emp) {
        const auto& o = orc[key];
        double x0 = 0, x1 = 0, y1 = 0;
        for (const auto* v : {&atoms, &o})
            for (const auto& [x, y] : *v) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        double pad = std::max(0.5, 0.05 * (x1 - x0));
        Svg svg(x0 - pad, x1 + pad, 0, y1 * 1.1,
                "conditional atoms, n=" + std::to_string(key.first) + ", i=" + std::to_string(key.second));
        for (const auto& [x, y] : atoms) svg.stem(x, y, "#1f77b4");
        for (const auto& [x, y] : o) svg.ring(x, y, "#d62728");
        svg.legend(0, "#1f77b4", "exact pushforward");
        svg.legend(1, "#d62728", "predicted");
        write(out / ("atoms_n" + std::to_string(key.first) + "_i" + std::to_string(key.second) + ".svg"),
              svg.finish(), written);
    }
}

void tail_plots(const fs::path& dir, const nlohmann::json& summary, const fs::path& out,
                std::vector<std::string>& written) {
    // rows: b, mass, w, n_k, grid_size
    std::map<int, std::map<int, std::vector<std::pair<double, double>>>> by_nk;
    for (const auto& r : read_csv(dir / "tails.csv", 5))
        if (r[1] > 0) by_nk[static_cast<int>(r[3])][static_cast<int>(r[2])].push_back({r[0], std::log(r[1])});
    const char* colors[] = {"#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd"};
    for (const auto& [nk, series] : by_nk) {
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const auto& [w, pts] : series)
            for (const auto& [x, y] : pts) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        Svg svg(x0, x1, y0, y1, "log tail mass vs b, n_k=" + std::to_string(nk));
        int slot = 0;
        for (const auto& [w, pts] : series) {
            const char* col = colors[slot % 4];
            for (const auto& [x, y] : pts) svg.dot(x, y, col, 2.5);
            svg.legend(slot++, col, "w=" + std::to_string(w));
        }
        if (summary.contains("records"))
            for (const auto& rec : summary["records"])
                if (rec.value("n_k", -1) == nk && rec.contains("tail_slope")) {
                    double s = rec["tail_slope"], c = rec["tail_intercept"];
                    svg.polyline({{x0, c + s * x0}, {x1, c + s * x1}}, "#d62728", "5,3");
                    svg.legend(slot++, "#d62728", "fit, slope " + tick(s));
                }
        write(out / ("tails_nk" + std::to_string(nk) + ".svg"), svg.finish(), written);
    }
}

}  // namespace

std::vector<std::string> emit_plots(const std::string& dir_str) {
    const fs::path dir(dir_str);
    std::ifstream f(dir / "summary.json");
    if (!f) fail(ErrorKind::IoError, "no summary.json in " + dir_str);
    nlohmann::json summary;
    try {
        summary = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::IoError, "unreadable summary.json: " + std::string(e.what()));
    }
    const fs::path out = dir / "plots";
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + out.string());
    std::vector<std::string> written;
    const std::string kind = summary.value("kind", "");
    if (kind == "iet-pl")
        density_plots(dir, out, written);
    else if (kind == "iet-pc")
        atom_plots(dir, out, written);
    else if (kind == "rotation-log")
        tail_plots(dir, summary, out, written);
    else
        fail(ErrorKind::IoError, "summary.json has unknown kind '" + kind + "'");
    return written;
}

}  // namespace ergoscope
