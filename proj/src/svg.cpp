#include "sislab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sislab/csv.hpp"
#include "sislab/errors.hpp"

namespace sislab {

namespace {

// Panel geometry in user units; the viewBox is a pure function of the panel
// count, so identical input always yields identical bytes.
constexpr double kPlotW = 360.0, kPlotH = 280.0;
constexpr double kMarginL = 64.0, kMarginR = 16.0, kMarginT = 34.0, kMarginB = 46.0;
constexpr double kPanelW = kMarginL + kPlotW + kMarginR;
constexpr double kPanelH = kMarginT + kPlotH + kMarginB;

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '&')
            out += "&amp;";
        else if (ch == '<')
            out += "&lt;";
        else if (ch == '>')
            out += "&gt;";
        else if (ch == '"')
            out += "&quot;";
        else
            out += ch;
    }
    return out;
}

struct Range {
    double lo = 0.0, hi = 1.0;
};

Range data_range(const SvgPanel& panel, bool vertical) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& s : panel.series) {
        const auto& v = vertical ? s.y : s.x;
        for (double value : v) {
            if (first) {
                lo = hi = value;
                first = false;
            } else {
                lo = std::min(lo, value);
                hi = std::max(hi, value);
            }
        }
    }
    if (hi == lo) {
        double pad = lo == 0.0 ? 0.5 : std::abs(lo) * 0.5;
        lo -= pad;
        hi += pad;
    }
    if (vertical) { // headroom so curves do not touch the frame
        double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi};
}

struct Tick {
    double value = 0.0;
    std::string label;
};

// Step at a 1/2/5 x 10^k multiple sized for about four intervals.
double nice_step(double range) {
    double raw = range / 4.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double base = raw / mag;
    double mult = base < 1.5 ? 1.0 : base < 3.5 ? 2.0 : base < 7.5 ? 5.0 : 10.0;
    return mult * mag;
}

std::string tick_label(double value, double step) {
    int decimals = static_cast<int>(std::max(0.0, -std::floor(std::log10(step))));
    if (decimals > 12)
        return csvio::format_full(value);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::vector<Tick> make_ticks(const Range& r) {
    double step = nice_step(r.hi - r.lo);
    long k0 = static_cast<long>(std::ceil(r.lo / step - 1e-9));
    std::vector<Tick> ticks;
    for (long k = k0; k * step <= r.hi + 1e-9 * (r.hi - r.lo) && ticks.size() < 16; ++k) {
        double v = static_cast<double>(k) * step;
        ticks.push_back({v, tick_label(v, step)});
    }
    return ticks;
}

void render_panel(std::ostringstream& out, const SvgPanel& panel, int index) {
    double x0 = index * kPanelW + kMarginL;
    double y0 = kMarginT;
    Range rx = data_range(panel, false);
    Range ry = data_range(panel, true);
    auto px = [&](double x) { return x0 + (x - rx.lo) / (rx.hi - rx.lo) * kPlotW; };
    auto py = [&](double y) { return y0 + kPlotH - (y - ry.lo) / (ry.hi - ry.lo) * kPlotH; };

    out << "<g>\n";
    // gridlines and ticks
    for (const Tick& t : make_ticks(rx)) {
        double x = px(t.value);
        out << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(y0) << "\" x2=\"" << fmt2(x)
            << "\" y2=\"" << fmt2(y0 + kPlotH) << "\" stroke=\"#e4e4e4\" stroke-width=\"1\"/>\n";
        out << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(y0 + kPlotH) << "\" x2=\"" << fmt2(x)
            << "\" y2=\"" << fmt2(y0 + kPlotH + 4) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(y0 + kPlotH + 17)
            << "\" text-anchor=\"middle\">" << escape_text(t.label) << "</text>\n";
    }
    for (const Tick& t : make_ticks(ry)) {
        double y = py(t.value);
        out << "<line x1=\"" << fmt2(x0) << "\" y1=\"" << fmt2(y) << "\" x2=\""
            << fmt2(x0 + kPlotW) << "\" y2=\"" << fmt2(y)
            << "\" stroke=\"#e4e4e4\" stroke-width=\"1\"/>\n";
        out << "<line x1=\"" << fmt2(x0 - 4) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(x0)
            << "\" y2=\"" << fmt2(y) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt2(x0 - 7) << "\" y=\"" << fmt2(y + 4)
            << "\" text-anchor=\"end\">" << escape_text(t.label) << "</text>\n";
    }
    // frame
    out << "<rect x=\"" << fmt2(x0) << "\" y=\"" << fmt2(y0) << "\" width=\"" << fmt2(kPlotW)
        << "\" height=\"" << fmt2(kPlotH) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    // title and axis labels
    out << "<text x=\"" << fmt2(x0 + kPlotW / 2) << "\" y=\"" << fmt2(y0 - 12)
        << "\" text-anchor=\"middle\" font-size=\"14\">" << escape_text(panel.title)
        << "</text>\n";
    out << "<text x=\"" << fmt2(x0 + kPlotW / 2) << "\" y=\"" << fmt2(y0 + kPlotH + 36)
        << "\" text-anchor=\"middle\">" << escape_text(panel.x_label) << "</text>\n";
    out << "<text x=\"" << fmt2(x0 - 46) << "\" y=\"" << fmt2(y0 + kPlotH / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << fmt2(x0 - 46) << " "
        << fmt2(y0 + kPlotH / 2) << ")\">" << escape_text(panel.y_label) << "</text>\n";
    // curves: exactly one polyline per series
    for (const auto& s : panel.series) {
        out << "<polyline fill=\"none\" stroke=\"" << escape_text(s.color)
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << (i ? " " : "") << fmt2(px(s.x[i])) << ',' << fmt2(py(s.y[i]));
        out << "\"/>\n";
    }
    // legend, top-right corner of the plot area
    for (std::size_t i = 0; i < panel.series.size(); ++i) {
        double ly = y0 + 14 + 16.0 * static_cast<double>(i);
        double lx = x0 + kPlotW - 96;
        out << "<line x1=\"" << fmt2(lx) << "\" y1=\"" << fmt2(ly) << "\" x2=\"" << fmt2(lx + 22)
            << "\" y2=\"" << fmt2(ly) << "\" stroke=\"" << escape_text(panel.series[i].color)
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt2(lx + 27) << "\" y=\"" << fmt2(ly + 4) << "\">"
            << escape_text(panel.series[i].label) << "</text>\n";
    }
    out << "</g>\n";
}

} // namespace

std::string render_svg(const std::vector<SvgPanel>& panels) {
    if (panels.empty())
        throw ValidationError("svg: no panels to render");
    for (const auto& p : panels) {
        if (p.series.empty())
            throw ValidationError("svg: panel \"" + p.title + "\" has no series");
        for (const auto& s : p.series) {
            if (s.x.empty())
                throw ValidationError("svg: series \"" + s.label + "\" is empty");
            if (s.x.size() != s.y.size())
                throw ValidationError("svg: series \"" + s.label +
                                      "\" has mismatched x/y lengths");
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                    throw ValidationError("svg: series \"" + s.label +
                                          "\" contains a non-finite sample");
        }
    }
    double width = kPanelW * static_cast<double>(panels.size());
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt2(width) << ' '
        << fmt2(kPanelH) << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"11\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt2(width) << "\" height=\"" << fmt2(kPanelH)
        << "\" fill=\"#ffffff\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        render_panel(out, panels[i], static_cast<int>(i));
    out << "</svg>\n";
    return out.str();
}

} // namespace sislab
