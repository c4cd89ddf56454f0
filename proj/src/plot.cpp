#include "embedsim/plot.hpp"

#include <array>
#include <cstdio>
#include <functional>
#include <fstream>
#include <sstream>
#include <vector>

#include "embedsim/errors.hpp"

namespace embedsim {

namespace {

constexpr double kWidth = 960;
constexpr double kHeight = 380;
constexpr double kLeft = 64;
constexpr double kRight = 18;
constexpr double kTop = 34;
constexpr double kBottom = 46;

const char* kOperatorColors[2] = {"#d62728", "#1f77b4"};
const char* kServiceColors[3] = {"#2ca02c", "#9467bd", "#ff7f0e"};

std::string f3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

class Chart {
 public:
  Chart(const MetricsTable& table, const std::string& title)
      : table_(table), n_(static_cast<int>(table.rounds.size())) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    os_ << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    os_ << "<text x=\"" << f3(kLeft) << "\" y=\"20\" font-family=\"sans-serif\""
        << " font-size=\"14\" fill=\"#222\">" << title << "</text>\n";
  }

  double x(int i) const {
    const int denom = n_ > 1 ? n_ - 1 : 1;
    return kLeft + (kWidth - kLeft - kRight) * i / denom;
  }
  static double y(double v) {
    return kTop + (kHeight - kTop - kBottom) * (1.0 - v);
  }

  void emergency_bands() {
    int i = 0;
    while (i < n_) {
      if (table_.rounds[i].mode != Mode::emergency) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < n_ && table_.rounds[j + 1].mode == Mode::emergency) ++j;
      os_ << "<rect x=\"" << f3(x(i)) << "\" y=\"" << f3(kTop) << "\" width=\""
          << f3(x(j) - x(i)) << "\" height=\""
          << f3(kHeight - kTop - kBottom)
          << "\" fill=\"#f4d7d7\" fill-opacity=\"0.5\"/>\n";
      i = j + 1;
    }
  }

  void axes() {
    for (int k = 0; k <= 4; ++k) {
      const double v = k * 0.25;
      os_ << "<line x1=\"" << f3(kLeft) << "\" y1=\"" << f3(y(v))
          << "\" x2=\"" << f3(kWidth - kRight) << "\" y2=\"" << f3(y(v))
          << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
      os_ << "<text x=\"" << f3(kLeft - 8) << "\" y=\"" << f3(y(v) + 4)
          << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\""
          << " text-anchor=\"end\">" << f3(v) << "</text>\n";
    }
    if (n_ > 0) {
      int tick = 1;
      while (n_ / tick > 8) {
        if (n_ / (tick * 2) <= 8)
          tick *= 2;
        else if (n_ / (tick * 5) <= 8)
          tick *= 5;
        else
          tick *= 10;
      }
      for (int r = 0; r < n_; r += tick) {
        os_ << "<text x=\"" << f3(x(r)) << "\" y=\""
            << f3(kHeight - kBottom + 18)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\""
            << " text-anchor=\"middle\">" << table_.rounds[r].round
            << "</text>\n";
      }
    }
    os_ << "<text x=\"" << f3((kLeft + kWidth - kRight) / 2) << "\" y=\""
        << f3(kHeight - 10)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444\""
        << " text-anchor=\"middle\">round</text>\n";
    os_ << "<rect x=\"" << f3(kLeft) << "\" y=\"" << f3(kTop) << "\" width=\""
        << f3(kWidth - kLeft - kRight) << "\" height=\""
        << f3(kHeight - kTop - kBottom)
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  }

  void polyline(const std::vector<std::optional<double>>& series,
                const char* color, double width, double opacity) {
    int i = 0;
    while (i < n_) {
      if (!series[i]) {
        ++i;
        continue;
      }
      int j = i;
      std::ostringstream points;
      while (j < n_ && series[j]) {
        points << f3(x(j)) << ',' << f3(y(*series[j]));
        if (j + 1 < n_ && series[j + 1]) points << ' ';
        ++j;
      }
      if (j - i == 1) {
        os_ << "<circle cx=\"" << f3(x(i)) << "\" cy=\"" << f3(y(*series[i]))
            << "\" r=\"" << f3(width) << "\" fill=\"" << color
            << "\" fill-opacity=\"" << f3(opacity) << "\"/>\n";
      } else {
        os_ << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"" << f3(width) << "\" stroke-opacity=\""
            << f3(opacity) << "\" points=\"" << points.str() << "\"/>\n";
      }
      i = j;
    }
  }

  // Filled region between two stacked cumulative series.
  void band(const std::vector<double>& lower, const std::vector<double>& upper,
            const char* color) {
    if (n_ == 0) return;
    std::ostringstream d;
    d << "M" << f3(x(0)) << ',' << f3(y(upper[0]));
    for (int i = 1; i < n_; ++i) d << " L" << f3(x(i)) << ',' << f3(y(upper[i]));
    for (int i = n_ - 1; i >= 0; --i)
      d << " L" << f3(x(i)) << ',' << f3(y(lower[i]));
    d << " Z";
    os_ << "<path d=\"" << d.str() << "\" fill=\"" << color
        << "\" fill-opacity=\"0.75\" stroke=\"none\"/>\n";
  }

  void legend_entry(int slot, const char* color, const std::string& label,
                    bool line) {
    const double lx = kWidth - kRight - 190;
    const double ly = kTop + 14 + 16 * slot;
    if (line) {
      os_ << "<line x1=\"" << f3(lx) << "\" y1=\"" << f3(ly - 4) << "\" x2=\""
          << f3(lx + 18) << "\" y2=\"" << f3(ly - 4) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
    } else {
      os_ << "<rect x=\"" << f3(lx) << "\" y=\"" << f3(ly - 11)
          << "\" width=\"18\" height=\"10\" fill=\"" << color
          << "\" fill-opacity=\"0.75\"/>\n";
    }
    os_ << "<text x=\"" << f3(lx + 24) << "\" y=\"" << f3(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">"
        << label << "</text>\n";
  }

  void no_data() {
    os_ << "<text x=\"" << f3(kWidth / 2) << "\" y=\"" << f3(kHeight / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#888\""
        << " text-anchor=\"middle\">no rounds recorded</text>\n";
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  const MetricsTable& table_;
  int n_;
  std::ostringstream os_;
};

}  // namespace

std::string render_rejection_chart(const MetricsTable& table, int window) {
  Chart chart(table, "Mass-weighted rejection rate per round");
  chart.emergency_bands();
  chart.axes();
  const int n = static_cast<int>(table.rounds.size());
  if (n == 0) chart.no_data();
  for (Operator op : all_operators) {
    std::vector<std::optional<double>> raw(n);
    for (int i = 0; i < n; ++i) {
      long long rejected = 0, resolved = 0;
      for (ServiceKind s : all_services) {
        rejected += table.rounds[i].at(op, s).rejected_mass;
        resolved += table.rounds[i].at(op, s).resolved_mass;
      }
      raw[i] = rejection_rate(rejected, resolved);
    }
    const char* color = kOperatorColors[index_of(op)];
    chart.polyline(raw, color, 1.0, 0.25);
    chart.polyline(smooth(raw, window), color, 2.0, 1.0);
    chart.legend_entry(index_of(op), color, table.operator_names[index_of(op)],
                       true);
  }
  return chart.finish();
}

namespace {

std::string render_stacked(const MetricsTable& table,
                           const std::string& title, int parts,
                           const std::function<int(const RoundMetrics&, int)>&
                               cells_of,
                           const std::function<std::string(int)>& label_of,
                           const char* const* colors) {
  Chart chart(table, title);
  chart.emergency_bands();
  const int n = static_cast<int>(table.rounds.size());
  std::vector<double> lower(n, 0.0), upper(n, 0.0);
  for (int p = 0; p < parts; ++p) {
    for (int i = 0; i < n; ++i) {
      const RoundMetrics& rm = table.rounds[i];
      const double frac =
          rm.substrate_cells == 0
              ? 0.0
              : static_cast<double>(cells_of(rm, p)) / rm.substrate_cells;
      upper[i] = lower[i] + frac;
    }
    chart.band(lower, upper, colors[p]);
    lower = upper;
  }
  chart.axes();
  if (n == 0) chart.no_data();
  for (int p = 0; p < parts; ++p)
    chart.legend_entry(p, colors[p], label_of(p), false);
  return chart.finish();
}

}  // namespace

std::string render_occupancy_by_vo(const MetricsTable& table) {
  return render_stacked(
      table, "Occupancy per round by operator", 2,
      [](const RoundMetrics& rm, int p) {
        int cells = 0;
        for (ServiceKind s : all_services)
          cells += rm.at(all_operators[p], s).occupied_cells;
        return cells;
      },
      [&](int p) { return table.operator_names[p]; }, kOperatorColors);
}

std::string render_occupancy_by_service(const MetricsTable& table) {
  return render_stacked(
      table, "Occupancy per round by service", 3,
      [](const RoundMetrics& rm, int p) {
        int cells = 0;
        for (Operator op : all_operators)
          cells += rm.at(op, all_services[p]).occupied_cells;
        return cells;
      },
      [](int p) { return std::string(to_string(all_services[p])); },
      kServiceColors);
}

void write_plots(const std::string& dir, const MetricsTable& table,
                 int window) {
  const std::array<std::pair<const char*, std::string>, 3> files = {{
      {"rejection.svg", render_rejection_chart(table, window)},
      {"occupancy_by_vo.svg", render_occupancy_by_vo(table)},
      {"occupancy_by_service.svg", render_occupancy_by_service(table)},
  }};
  for (const auto& [name, content] : files) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
    if (!out) throw Error("failed writing " + path);
  }
}

}  // namespace embedsim
