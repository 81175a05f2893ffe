#include "slm/cli/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "slm/errors.hpp"

namespace slm::cli {
namespace {

constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

// Fixed two-decimal coordinates keep the output byte-stable.
std::string num(double v, int precision = 2)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    std::string s(buf, res.ptr);
    if (s == "-0.00")
        s = "0.00";
    return s;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;
    double w, h;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (w - kLeft - kRight); }
    double py(double y) const { return h - kBottom - (y - y0) / (y1 - y0) * (h - kTop - kBottom); }
};

void open_doc(std::ostringstream& os, const SvgStyle& st)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << st.width << "\" height=\"" << st.height
       << "\" viewBox=\"0 0 " << st.width << ' ' << st.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!st.title.empty())
        os << "<text x=\"" << num(st.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
           << escape(st.title) << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const SvgStyle& st)
{
    const double bx = f.px(f.x0), by = f.py(f.y0), tx = f.px(f.x1), ty = f.py(f.y1);
    os << "<g stroke=\"black\" fill=\"none\">\n";
    os << "<line x1=\"" << num(bx) << "\" y1=\"" << num(by) << "\" x2=\"" << num(tx) << "\" y2=\"" << num(by)
       << "\"/>\n";
    os << "<line x1=\"" << num(bx) << "\" y1=\"" << num(by) << "\" x2=\"" << num(bx) << "\" y2=\"" << num(ty)
       << "\"/>\n";
    os << "</g>\n<g fill=\"black\">\n";
    constexpr int kTicks = 5;
    for (int k = 0; k <= kTicks; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / kTicks;
        const double yv = f.y0 + (f.y1 - f.y0) * k / kTicks;
        os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(by + 16) << "\" text-anchor=\"middle\">"
           << num(xv, 3) << "</text>\n";
        os << "<text x=\"" << num(bx - 6) << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">"
           << num(yv, 3) << "</text>\n";
    }
    os << "<text x=\"" << num((bx + tx) / 2) << "\" y=\"" << num(f.h - 10) << "\" text-anchor=\"middle\">"
       << escape(st.x_label) << "</text>\n";
    if (!st.y_label.empty())
        os << "<text x=\"16\" y=\"" << num((by + ty) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
           << num((by + ty) / 2) << ")\">" << escape(st.y_label) << "</text>\n";
    os << "</g>\n";
}

void markers(std::ostringstream& os, const Frame& f, const SvgStyle& st)
{
    for (const auto& m : st.markers) {
        if (!(m.value >= f.x0 && m.value <= f.x1))
            continue;
        const double x = f.px(m.value);
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.py(f.y0)) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(f.py(f.y1)) << "\" stroke=\"" << escape(m.color) << "\" stroke-dasharray=\"4 3\"/>\n";
        os << "<text x=\"" << num(x + 3) << "\" y=\"" << num(f.py(f.y1) + 12) << "\" fill=\"" << escape(m.color)
           << "\">" << escape(m.label) << "</text>\n";
    }
}

}  // namespace

std::string render_histogram_svg(const measure::Histogram& h, const SvgStyle& st)
{
    if (h.bins() == 0 || h.total == 0)
        throw EmptyDataError("cannot render an empty histogram");
    double top = 0.0;
    for (std::size_t b = 0; b < h.bins(); ++b)
        top = std::max(top, h.density(b));
    const Frame f{h.edges.front(), h.edges.back(), 0.0, top * 1.05, double(st.width), double(st.height)};

    std::ostringstream os;
    open_doc(os, st);
    axes(os, f, st);
    os << "<path fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\" d=\"M" << num(f.px(h.edges.front())) << ','
       << num(f.py(0.0));
    for (std::size_t b = 0; b < h.bins(); ++b) {
        const double y = f.py(h.density(b));
        os << " L" << num(f.px(h.edges[b])) << ',' << num(y) << " L" << num(f.px(h.edges[b + 1])) << ','
           << num(y);
    }
    os << " L" << num(f.px(h.edges.back())) << ',' << num(f.py(0.0)) << "\"/>\n";
    markers(os, f, st);
    os << "</svg>\n";
    return os.str();
}

std::string render_bifurcation_svg(const experiments::BifurcationDataset& ds, const SvgStyle& st)
{
    std::size_t states = 0;
    for (const auto& r : ds.rows)
        states += r.terminal_states.size();
    if (ds.rows.empty() || states == 0)
        throw EmptyDataError("cannot render an empty bifurcation dataset");

    double lo = ds.rows.front().parameter, hi = ds.rows.back().parameter;
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const Frame f{lo, hi, 0.0, 1.0, double(st.width), double(st.height)};
    const int cols = static_cast<int>(std::ceil(f.px(hi) - f.px(lo))) + 1;
    const int rows = static_cast<int>(std::ceil(f.py(0.0) - f.py(1.0))) + 1;
    std::vector<bool> hit(static_cast<std::size_t>(cols) * rows, false);
    for (const auto& r : ds.rows) {
        const int c = static_cast<int>(std::floor(f.px(r.parameter) - f.px(lo)));
        for (double x : r.terminal_states) {
            if (!(x >= 0.0 && x <= 1.0))
                continue;
            const int k = static_cast<int>(std::floor(f.py(x) - f.py(1.0)));
            hit[static_cast<std::size_t>(std::clamp(k, 0, rows - 1)) * cols + std::clamp(c, 0, cols - 1)] = true;
        }
    }

    std::ostringstream os;
    open_doc(os, st);
    axes(os, f, st);
    os << "<g fill=\"#1f1f1f\">\n";
    for (int k = 0; k < rows; ++k)
        for (int c = 0; c < cols; ++c)
            if (hit[static_cast<std::size_t>(k) * cols + c])
                os << "<rect x=\"" << num(f.px(lo) + c) << "\" y=\"" << num(f.py(1.0) + k)
                   << "\" width=\"1\" height=\"1\"/>\n";
    os << "</g>\n";
    markers(os, f, st);
    os << "</svg>\n";
    return os.str();
}

}  // namespace slm::cli
