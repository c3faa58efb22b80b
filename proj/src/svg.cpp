#include "imapce/svg.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace imapce {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                          "#aec7e8", "#ffbb78"};
constexpr int kPaletteSize = 12;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

void write_scatter_svg(const std::filesystem::path& path, const std::vector<SvgPanel>& panels) {
    if (panels.empty()) throw std::invalid_argument("no panels to draw");
    const double width = 420.0, panel_h = 320.0, margin = 36.0;
    const double height = panel_h * static_cast<double>(panels.size());

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const SvgPanel& panel = panels[p];
        if (panel.points.cols() != 2)
            throw std::invalid_argument("scatter panels need 2D points");
        if (panel.classes.size() != panel.points.rows())
            throw std::invalid_argument("class vector length mismatch");
        const double y0 = panel_h * static_cast<double>(p);

        double xmin = panel.points.col(0).minCoeff(), xmax = panel.points.col(0).maxCoeff();
        double ymin = panel.points.col(1).minCoeff(), ymax = panel.points.col(1).maxCoeff();
        if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
        if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
        const double sx = (width - 2 * margin) / (xmax - xmin);
        const double sy = (panel_h - 2 * margin) / (ymax - ymin);

        out << "<text x=\"" << margin << "\" y=\"" << fmt(y0 + 18.0)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << panel.title << "</text>\n";
        out << "<rect x=\"" << margin << "\" y=\"" << fmt(y0 + margin) << "\" width=\""
            << width - 2 * margin << "\" height=\"" << panel_h - 2 * margin
            << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

        std::unordered_set<Index> framed(panel.framed.begin(), panel.framed.end());
        for (Index i = 0; i < panel.points.rows(); ++i) {
            const double cx = margin + (panel.points(i, 0) - xmin) * sx;
            const double cy = y0 + panel_h - margin - (panel.points(i, 1) - ymin) * sy;
            const int cls = panel.classes(i);
            const char* color = cls == -1 ? "#b0b0b0"
                                : cls == -2 ? "#000000"
                                            : kPalette[((cls % kPaletteSize) + kPaletteSize) % kPaletteSize];
            out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"2\" fill=\""
                << color << "\"";
            if (framed.count(i)) out << " stroke=\"black\" stroke-width=\"1\"";
            out << "/>\n";
        }
    }
    out << "</svg>\n";
}

} // namespace imapce
