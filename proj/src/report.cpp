#include "delayvar/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace delayvar {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Series {
  std::string label;
  std::vector<double> t, y;
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// One chart with axes, tick labels and a legend at vertical offset `top`.
void chart(std::ostream& os, double top, const std::string& title, const std::vector<Series>& series) {
  const double left = 70, width = 620, height = 220;
  double tmin = 0, tmax = 1, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (first) {
        tmin = tmax = s.t[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      tmin = std::min(tmin, s.t[i]);
      tmax = std::max(tmax, s.t[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (tmax <= tmin) tmax = tmin + 1;
  if (ymax - ymin < 1e-300 + 1e-12 * std::abs(ymax)) {
    ymin -= 1;
    ymax += 1;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto X = [&](double t) { return left + width * (t - tmin) / (tmax - tmin); };
  auto Y = [&](double y) { return top + height * (1 - (y - ymin) / (ymax - ymin)); };

  os << "<text x=\"" << left << "\" y=\"" << top - 10 << "\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tv = tmin + (tmax - tmin) * i / 4;
    const double yv = ymin + (ymax - ymin) * i / 4;
    os << "<text x=\"" << X(tv) << "\" y=\"" << top + height + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
       << short_number(tv) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << Y(yv) + 3 << "\" font-size=\"10\" text-anchor=\"end\">"
       << short_number(yv) << "</text>\n";
  }
  os << "<text x=\"" << left + width / 2 << "\" y=\"" << top + height + 32
     << "\" font-size=\"11\" text-anchor=\"middle\">t</text>\n";
  if (tmin < 0 && tmax > 0) {
    os << "<line x1=\"" << X(0) << "\" y1=\"" << top << "\" x2=\"" << X(0) << "\" y2=\"" << top + height
       << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    char buf[64];
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", X(s.t[i]), Y(s.y[i]));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << left + width + 10 << "\" y=\"" << top + 14 + 16 * k << "\" font-size=\"11\" fill=\""
       << color << "\">" << s.label << "</text>\n";
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& x) {
  auto out = open_out(path);
  const Eigen::Index n = x.dim();
  out << "t";
  for (Eigen::Index k = 1; k <= n; ++k) out << ",x" << k;
  for (Eigen::Index k = 1; k <= n; ++k) out << ",dx" << k;
  out << "\n";
  const Grid& grid = x.grid();
  for (int i = x.delay_steps(); i >= 1; --i) {
    const double t = -i * grid.step();
    const Vector v = x.value(t);
    out << format_number(t);
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_number(v[k]);
    for (Eigen::Index k = 0; k < n; ++k) out << ",";
    out << "\n";
  }
  for (int j = 0; j <= grid.intervals(); ++j) {
    out << format_number(grid.node(j));
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_number(x.values()(k, j));
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_number(x.slopes()(k, j));
    out << "\n";
  }
}

TrajectoryData read_trajectory_csv(const std::filesystem::path& path, const Grid& grid, Eigen::Index dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open trajectory file");
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw std::runtime_error(path.string() + ": empty trajectory file");
  const auto header = split_csv(line);
  if (static_cast<Eigen::Index>(header.size()) != 1 + 2 * dim) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(1 + 2 * dim) + " columns for dimension " +
                             std::to_string(dim) + ", found " + std::to_string(header.size()));
  }
  const int N = grid.intervals();
  TrajectoryData data{Eigen::MatrixXd(dim, N + 1), Eigen::MatrixXd(dim, N + 1)};
  int j = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    }
    double t = 0;
    try {
      t = std::stod(cells[0]);
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad time value");
    }
    if (t < 0) continue;  // history rows
    if (j > N) throw std::runtime_error(path.string() + ": more node rows than the grid has nodes");
    if (std::abs(t - grid.node(j)) > 1e-12 * grid.horizon()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": time " + cells[0] +
                               " does not match grid node " + format_number(grid.node(j)));
    }
    try {
      for (Eigen::Index k = 0; k < dim; ++k) {
        data.values(k, j) = std::stod(cells[1 + k]);
        data.slopes(k, j) = std::stod(cells[1 + dim + k]);
      }
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad node data");
    }
    ++j;
  }
  if (j != N + 1) {
    throw std::runtime_error(path.string() + ": found " + std::to_string(j) + " node rows, the grid has " +
                             std::to_string(N + 1));
  }
  return data;
}

void write_el_report_csv(const std::filesystem::path& path, const ELReport& el) {
  auto out = open_out(path);
  const Eigen::Index n = el.c_est.dim();
  out << "t";
  for (const char* name : {"q", "P", "c", "residual"}) {
    for (Eigen::Index k = 1; k <= n; ++k) out << "," << name << "_" << k;
  }
  out << "\n";
  for (std::size_t j = 0; j < el.times.size(); ++j) {
    const Covector res = el.residual(j);
    out << format_number(el.times[j]);
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_number(el.q[j][k]);
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_number(el.P[j][k]);
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_number(el.c_est[k]);
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_number(res[k]);
    out << "\n";
  }
}

void write_key_value_csv(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::string>>& fields) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
  out << "\n";
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << quote(fields[i].second);
  out << "\n";
}

void write_levels_csv(const std::filesystem::path& path, const ConvergenceTable& table) {
  auto out = open_out(path);
  out << "N,J,grad_norm,residual_osc,weak_stationarity,converged,iterations,diagnostic\n";
  for (const auto& r : table.rows) {
    out << r.N << "," << format_number(r.J) << "," << format_number(r.grad_norm) << ","
        << format_number(r.residual_osc) << "," << format_number(r.weak_stationarity) << ","
        << (r.converged ? "true" : "false") << "," << r.iterations << "," << quote(r.diagnostic) << "\n";
  }
}

void write_identity_csv(const std::filesystem::path& path, const IdentityReport& rep) {
  auto out = open_out(path);
  out << "check,cases,max_discrepancy,tolerance,pass\n";
  for (const auto& c : rep.checks) {
    out << c.name << "," << c.cases << "," << format_number(c.max_discrepancy) << "," << format_number(c.tolerance)
        << "," << (c.pass ? "true" : "false") << "\n";
  }
}

void write_plot_svg(const std::filesystem::path& path, const Trajectory& x, const ELReport& el) {
  const Eigen::Index n = x.dim();
  const Grid& grid = x.grid();
  std::vector<Series> traj(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) traj[k].label = "x" + std::to_string(k + 1);
  const int per = 4;
  const int hist = x.delay_steps() * per;
  for (int i = -hist; i <= grid.intervals() * per; ++i) {
    const double t = i == grid.intervals() * per ? grid.horizon() : i * grid.step() / per;
    const Vector v = x.value(t);
    for (Eigen::Index k = 0; k < n; ++k) {
      traj[k].t.push_back(t);
      traj[k].y.push_back(v[k]);
    }
  }
  std::vector<Series> res(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) res[k].label = "residual " + std::to_string(k + 1);
  for (std::size_t j = 0; j < el.times.size(); ++j) {
    const Covector r = el.residual(j);
    for (Eigen::Index k = 0; k < n; ++k) {
      res[k].t.push_back(el.times[j]);
      res[k].y.push_back(r[k]);
    }
  }

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"820\" height=\"620\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  chart(out, 40, "trajectory", traj);
  chart(out, 350, "Euler-Lagrange residual q - P - c", res);
  out << "</svg>\n";
}

}  // namespace delayvar
