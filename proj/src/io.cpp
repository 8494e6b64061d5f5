#include "rvcop/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rvcop/dates.hpp"
#include "rvcop/matxform.hpp"

namespace rvcop {

std::string format_double(double v) {
  char buf[40];
  // shortest representation that round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back;
    if (std::sscanf(buf, "%lf", &back) == 1 && back == v) return buf;
  }
  return buf;
}

void log_json(const std::string& level, const std::string& msg,
              const std::vector<std::pair<std::string, std::string>>& fields) {
  nlohmann::json j;
  j["level"] = level;
  j["msg"] = msg;
  for (const auto& [k, v] : fields) j[k] = v;
  std::cerr << j.dump() << "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DataError("bad numeric field '" + s + "' in " + context);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

// "2000-01-03T09:30:00Z" or with fractional seconds / offset-less
std::pair<std::string, double> parse_timestamp(const std::string& ts) {
  const auto t_pos = ts.find('T');
  if (t_pos == std::string::npos || t_pos != 10)
    throw DataError("bad RFC-3339 timestamp '" + ts + "'");
  const std::string date = ts.substr(0, 10);
  std::string time = ts.substr(11);
  if (!time.empty() && (time.back() == 'Z' || time.back() == 'z')) time.pop_back();
  int h = 0, m = 0;
  double s = 0.0;
  if (std::sscanf(time.c_str(), "%d:%d:%lf", &h, &m, &s) != 3)
    throw DataError("bad time-of-day in timestamp '" + ts + "'");
  return {date, h * 3600.0 + m * 60.0 + s};
}

std::string format_timestamp(const std::string& date, double seconds) {
  const int h = static_cast<int>(seconds) / 3600;
  const int m = (static_cast<int>(seconds) % 3600) / 60;
  const double s = seconds - h * 3600 - m * 60;
  char buf[40];
  if (s == std::floor(s)) {
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02dZ", date.c_str(), h, m,
                  static_cast<int>(s));
  } else {
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%09.6fZ", date.c_str(), h, m, s);
  }
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Intraday panel
// ---------------------------------------------------------------------------

IntradayPanel read_intraday_csv(const std::string& path, double align_seconds) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
          std::vector<std::string>{"timestamp", "symbol", "logprice"})
    throw DataError(path + ": expected header 'timestamp,symbol,logprice'");

  struct Tick {
    double sec;
    double px;
  };
  std::map<std::string, std::map<std::string, std::vector<Tick>>> days;  // date -> symbol
  std::set<std::string> symbols;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 3 fields");
    const auto [date, sec] = parse_timestamp(f[0]);
    days[date][f[1]].push_back({sec, parse_double(f[2], path)});
    symbols.insert(f[1]);
  }
  if (days.empty()) throw DataError(path + ": no data rows");

  IntradayPanel panel;
  panel.assets.assign(symbols.begin(), symbols.end());
  const int n = panel.n_assets();

  // build the common time-of-day grid
  std::vector<double> grid;
  if (align_seconds > 0.0) {
    double lo = 1e30, hi = -1e30;
    for (const auto& [date, by_sym] : days)
      for (const auto& [sym, ticks] : by_sym)
        for (const Tick& t : ticks) {
          lo = std::min(lo, t.sec);
          hi = std::max(hi, t.sec);
        }
    for (double s = lo; s <= hi + 1e-9; s += align_seconds) grid.push_back(s);
  } else {
    std::set<double> times;
    for (const auto& [date, by_sym] : days)
      for (const auto& [sym, ticks] : by_sym)
        for (const Tick& t : ticks) times.insert(t.sec);
    grid.assign(times.begin(), times.end());
  }
  if (grid.size() < 2) throw DataError(path + ": need at least 2 grid points per day");

  for (auto& [date, by_sym] : days) {
    Matrix px(static_cast<int>(grid.size()), n);
    for (int a = 0; a < n; ++a) {
      const auto it = by_sym.find(panel.assets[a]);
      if (it == by_sym.end() || it->second.empty())
        throw DataError(path + ": no ticks for symbol '" + panel.assets[a] + "' on " + date);
      std::vector<Tick>& ticks = it->second;
      std::stable_sort(ticks.begin(), ticks.end(),
                       [](const Tick& x, const Tick& y) { return x.sec < y.sec; });
      // previous-tick alignment, single sweep; before the first tick, hold
      // the first tick's value
      std::size_t k = 0;
      double value = ticks.front().px;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        bool exact = false;
        while (k < ticks.size() && ticks[k].sec <= grid[g] + 1e-9) {
          value = ticks[k].px;
          exact = std::fabs(ticks[k].sec - grid[g]) < 1e-9;
          ++k;
        }
        if (align_seconds <= 0.0 && !exact)
          throw DataError(path + ": missing tick for '" + panel.assets[a] + "' on " +
                          date + " (use previous-tick alignment)");
        px(static_cast<int>(g), a) = value;
      }
    }
    panel.dates.push_back(date);
    panel.logprices.push_back(std::move(px));
  }
  panel.grid_seconds = grid;
  panel.validate();
  return panel;
}

void write_intraday_csv(const std::string& path, const IntradayPanel& panel) {
  std::ofstream out = open_output(path);
  out << "timestamp,symbol,logprice\n";
  for (int d = 0; d < panel.n_days(); ++d)
    for (std::size_t g = 0; g < panel.grid_seconds.size(); ++g)
      for (int a = 0; a < panel.n_assets(); ++a)
        out << format_timestamp(panel.dates[d], panel.grid_seconds[g]) << ','
            << panel.assets[a] << ','
            << format_double(panel.logprices[d](static_cast<int>(g), a)) << '\n';
}

// ---------------------------------------------------------------------------
// Covariance series
// ---------------------------------------------------------------------------

CovarianceSeries read_covariance_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) != std::vector<std::string>{"date", "i", "j", "value"})
    throw DataError(path + ": expected header 'date,i,j,value'");
  std::vector<std::string> dates;
  std::map<std::string, std::map<std::pair<int, int>, double>> cells;
  int dim = 0;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 4 fields");
    const int i = static_cast<int>(parse_double(f[1], path));
    const int j = static_cast<int>(parse_double(f[2], path));
    if (i < 1 || j < i)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": indices must satisfy 1 <= i <= j");
    if (cells.find(f[0]) == cells.end()) dates.push_back(f[0]);
    cells[f[0]][{i, j}] = parse_double(f[3], path);
    dim = std::max(dim, j);
  }
  CovarianceSeries series;
  for (const std::string& date : dates) {
    Matrix g(dim, dim);
    const auto& day = cells[date];
    for (int i = 1; i <= dim; ++i)
      for (int j = i; j <= dim; ++j) {
        const auto it = day.find({i, j});
        if (it == day.end())
          throw DataError(path + ": missing entry (" + std::to_string(i) + "," +
                          std::to_string(j) + ") on " + date);
        g(i - 1, j - 1) = g(j - 1, i - 1) = it->second;
      }
    series.dates.push_back(date);
    series.mats.push_back(std::move(g));
  }
  if (series.mats.empty()) throw DataError(path + ": no data rows");
  return series;
}

void write_covariance_csv(const std::string& path, const CovarianceSeries& series) {
  std::ofstream out = open_output(path);
  out << "date,i,j,value\n";
  for (int t = 0; t < series.size(); ++t) {
    const Matrix& g = series.mats[t];
    for (int i = 0; i < g.rows(); ++i)
      for (int j = i; j < g.cols(); ++j)
        out << series.dates[t] << ',' << i + 1 << ',' << j + 1 << ','
            << format_double(g(i, j)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Forecasts
// ---------------------------------------------------------------------------

void write_forecast_csv(const std::string& path,
                        const std::vector<std::string>& model_order,
                        const std::map<std::string, CovarianceSeries>& forecasts) {
  std::ofstream out = open_output(path);
  out << "date,model,i,j,value\n";
  int t_max = 0;
  for (const auto& [name, series] : forecasts)
    t_max = std::max(t_max, series.size());
  for (int t = 0; t < t_max; ++t) {
    for (const std::string& model : model_order) {
      const auto it = forecasts.find(model);
      if (it == forecasts.end() || t >= it->second.size()) continue;
      const Matrix& g = it->second.mats[t];
      if (g.size() == 0) continue;  // recorded failure for this day
      for (int i = 0; i < g.rows(); ++i)
        for (int j = i; j < g.cols(); ++j)
          out << it->second.dates[t] << ',' << model << ',' << i + 1 << ',' << j + 1
              << ',' << format_double(g(i, j)) << '\n';
    }
  }
}

std::map<std::string, CovarianceSeries> read_forecast_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) != std::vector<std::string>{"date", "model", "i", "j", "value"})
    throw DataError(path + ": expected header 'date,model,i,j,value'");
  struct Block {
    std::vector<std::string> dates;
    std::map<std::string, std::map<std::pair<int, int>, double>> cells;
    int dim = 0;
  };
  std::map<std::string, Block> blocks;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 5 fields");
    Block& b = blocks[f[1]];
    const int i = static_cast<int>(parse_double(f[2], path));
    const int j = static_cast<int>(parse_double(f[3], path));
    if (b.cells.find(f[0]) == b.cells.end()) b.dates.push_back(f[0]);
    b.cells[f[0]][{i, j}] = parse_double(f[4], path);
    b.dim = std::max(b.dim, j);
  }
  std::map<std::string, CovarianceSeries> out;
  for (auto& [model, b] : blocks) {
    CovarianceSeries series;
    for (const std::string& date : b.dates) {
      Matrix g(b.dim, b.dim);
      for (int i = 1; i <= b.dim; ++i)
        for (int j = i; j <= b.dim; ++j) {
          const auto it = b.cells[date].find({i, j});
          if (it == b.cells[date].end())
            throw DataError(path + ": missing forecast entry for model " + model + " on " +
                            date);
          g(i - 1, j - 1) = g(j - 1, i - 1) = it->second;
        }
      series.dates.push_back(date);
      series.mats.push_back(std::move(g));
    }
    out[model] = std::move(series);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Small report files
// ---------------------------------------------------------------------------

void write_summary_stats_csv(const std::string& path,
                             const std::vector<std::string>& labels,
                             const std::vector<SummaryStats>& stats) {
  if (labels.size() != stats.size())
    throw DataError("write_summary_stats_csv: label/stat count mismatch");
  std::ofstream out = open_output(path);
  out << "series,mean,max,min,std,skewness,kurtosis,hurst\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string("NA") : format_double(v); };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const SummaryStats& s = stats[i];
    out << labels[i] << ',' << cell(s.mean) << ',' << cell(s.max) << ',' << cell(s.min)
        << ',' << cell(s.std) << ',' << cell(s.skewness) << ',' << cell(s.kurtosis) << ','
        << cell(s.hurst) << '\n';
  }
}

void write_daily_returns_csv(const std::string& path, const IntradayPanel& panel,
                             const Matrix& returns) {
  std::ofstream out = open_output(path);
  out << "date,symbol,return\n";
  for (int d = 0; d < returns.rows(); ++d)
    for (int a = 0; a < returns.cols(); ++a)
      out << panel.dates[d] << ',' << panel.assets[a] << ','
          << format_double(returns(d, a)) << '\n';
}

std::pair<std::vector<std::string>, Matrix> read_daily_returns_csv(
    const std::string& path, std::vector<std::string>* dates) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) != std::vector<std::string>{"date", "symbol", "return"})
    throw DataError(path + ": expected header 'date,symbol,return'");
  std::vector<std::string> date_order;
  std::set<std::string> symbols;
  std::map<std::string, std::map<std::string, double>> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw DataError(path + ": expected 3 fields");
    if (cells.find(f[0]) == cells.end()) date_order.push_back(f[0]);
    cells[f[0]][f[1]] = parse_double(f[2], path);
    symbols.insert(f[1]);
  }
  std::vector<std::string> assets(symbols.begin(), symbols.end());
  Matrix r(static_cast<int>(date_order.size()), static_cast<int>(assets.size()));
  for (std::size_t d = 0; d < date_order.size(); ++d)
    for (std::size_t a = 0; a < assets.size(); ++a) {
      const auto it = cells[date_order[d]].find(assets[a]);
      if (it == cells[date_order[d]].end())
        throw DataError(path + ": missing return for '" + assets[a] + "' on " +
                        date_order[d]);
      r(static_cast<int>(d), static_cast<int>(a)) = it->second;
    }
  if (dates) *dates = date_order;
  return {assets, r};
}

void write_frontier_csv(const std::string& path, const std::vector<FrontierPoint>& pts) {
  std::ofstream out = open_output(path);
  out << "model,mu_p,avg_sd,n_feasible_days\n";
  for (const FrontierPoint& p : pts)
    out << p.model << ',' << format_double(p.mu_p) << ','
        << (std::isnan(p.avg_sd) ? std::string("NA") : format_double(p.avg_sd)) << ','
        << p.n_feasible_days << '\n';
}

void write_rank_corr_csv(const std::string& path, const Matrix& rho) {
  std::ofstream out = open_output(path);
  out << "row,col,rho\n";
  for (int i = 0; i < rho.rows(); ++i)
    for (int j = 0; j < rho.cols(); ++j)
      out << i + 1 << ',' << j + 1 << ','
          << (std::isnan(rho(i, j)) ? std::string("NA") : format_double(rho(i, j))) << '\n';
}

void write_gmvp_paths_csv(const std::string& path, const std::vector<GmvpPathRow>& rows) {
  std::ofstream out = open_output(path);
  out << "date,model,asset,weight\n";
  for (const GmvpPathRow& r : rows)
    out << r.date << ',' << r.model << ',' << r.asset << ',' << format_double(r.weight)
        << '\n';
}

}  // namespace rvcop
