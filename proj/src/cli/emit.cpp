#include "ehpc/cli/emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ehpc::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

class OutFile {
 public:
  explicit OutFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  std::ofstream& stream() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
}

void write_json(const fs::path& path, const ordered_json& doc) {
  OutFile f(path);
  f.stream() << doc.dump(2) << '\n';
  f.close();
}

template <class Row>
void write_csv_line(std::ostream& os, const Row& cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '\n';
}

std::vector<std::string> point_columns(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kV: return {"v"};
    case SweepAxis::kEMax: return {"e_max_joule"};
    case SweepAxis::kLambdaAlpha: return {"lambda_per_slot", "alpha_joule"};
    case SweepAxis::kSnrN: return {"snr_db", "antennas"};
  }
  return {};
}

std::vector<double> point_values(SweepAxis axis, SweepPoint p) {
  if (axis == SweepAxis::kV || axis == SweepAxis::kEMax) return {p.first};
  return {p.first, p.second};
}

}  // namespace

Format format_from_string(const std::string& s) {
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  throw std::invalid_argument("unknown format '" + s + "' (expected csv or json)");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<fs::path> emit_run(const SimSummary& s, std::span<const ReplicaTrace> traces,
                               Format format, const fs::path& dir) {
  prepare_dir(dir);
  std::vector<fs::path> written;
  double worst_residual = 0.0;
  for (double r : s.conservation_residuals) worst_residual = std::max(worst_residual, std::abs(r));

  if (format == Format::kCsv) {
    const fs::path path = dir / "summary.csv";
    OutFile f(path);
    f.stream() << "t,mean_avg_rate,stderr\n";
    for (std::size_t t = 0; t < s.avg_rate_series.size(); ++t)
      write_csv_line(f.stream(), std::vector<std::string>{std::to_string(t),
                                                          format_double(s.avg_rate_series[t]),
                                                          format_double(s.stderr_series[t])});
    f.close();
    written.push_back(path);
  } else {
    ordered_json doc;
    doc["controller"] = to_string(s.controller);
    doc["horizon"] = s.horizon;
    doc["replicas"] = s.replicas;
    doc["final_avg_rate"] = s.final_avg_rate;
    doc["final_stderr"] = s.final_stderr;
    doc["mean_power_watt"] = s.mean_power;
    doc["outage_slots"] = s.outage_slots;
    doc["max_abs_conservation_residual_joule"] = worst_residual;
    ordered_json series = ordered_json::array();
    for (std::size_t t = 0; t < s.avg_rate_series.size(); ++t)
      series.push_back({{"t", t}, {"mean_avg_rate", s.avg_rate_series[t]},
                        {"stderr", s.stderr_series[t]}});
    doc["series"] = std::move(series);
    const fs::path path = dir / "summary.json";
    write_json(path, doc);
    written.push_back(path);
  }

  if (!traces.empty()) {
    const fs::path path = dir / "trace.csv";
    OutFile f(path);
    f.stream() << "replica,t,e_a,gamma,p,rate,e_s,e_b_end,x\n";
    for (const ReplicaTrace& tr : traces)
      for (const SlotRecord& r : tr.records)
        write_csv_line(f.stream(),
                       std::vector<std::string>{std::to_string(tr.replica), std::to_string(r.t),
                                                format_double(r.e_a), format_double(r.gamma),
                                                format_double(r.p), format_double(r.rate),
                                                format_double(r.e_s), format_double(r.e_b_end),
                                                format_double(r.x)});
    f.close();
    written.push_back(path);
  }
  return written;
}

std::vector<fs::path> emit_sweep(SweepAxis axis, std::span<const SweepRow> rows, Format format,
                                 const fs::path& dir) {
  prepare_dir(dir);
  const auto cols = point_columns(axis);
  if (format == Format::kCsv) {
    const fs::path path = dir / "sweep.csv";
    OutFile f(path);
    std::vector<std::string> header = cols;
    if (!rows.empty())
      for (const SweepCell& c : rows.front().cells) {
        header.push_back(to_string(c.controller) + "_rate");
        header.push_back(to_string(c.controller) + "_stderr");
      }
    write_csv_line(f.stream(), header);
    for (const SweepRow& row : rows) {
      std::vector<std::string> line;
      for (double v : point_values(axis, row.point)) line.push_back(format_double(v));
      for (const SweepCell& c : row.cells) {
        line.push_back(format_double(c.final_avg_rate));
        line.push_back(format_double(c.final_stderr));
      }
      write_csv_line(f.stream(), line);
    }
    f.close();
    return {path};
  }
  ordered_json doc;
  doc["axis"] = to_string(axis);
  ordered_json points = ordered_json::array();
  for (const SweepRow& row : rows) {
    ordered_json p;
    const auto vals = point_values(axis, row.point);
    for (std::size_t i = 0; i < cols.size(); ++i) p[cols[i]] = vals[i];
    ordered_json cells = ordered_json::object();
    for (const SweepCell& c : row.cells)
      cells[to_string(c.controller)] = {{"final_avg_rate", c.final_avg_rate},
                                        {"stderr", c.final_stderr}};
    p["controllers"] = std::move(cells);
    points.push_back(std::move(p));
  }
  doc["points"] = std::move(points);
  const fs::path path = dir / "sweep.json";
  write_json(path, doc);
  return {path};
}

std::vector<fs::path> emit_bounds(const BoundReport& r, const fs::path& dir) {
  prepare_dir(dir);
  ordered_json doc;
  doc["b_const"] = r.b_const;
  doc["v_max"] = r.v_max;
  doc["v"] = r.v;
  doc["a_shift"] = r.a_shift;
  doc["x_low"] = r.x_low;
  doc["x_up"] = r.x_up;
  doc["gamma_max"] = r.gamma_max;
  doc["gamma_max_db"] = linear_to_db(r.gamma_max);
  doc["gap_bounded"] = r.gap_bounded;
  doc["g_const"] = r.g_const;
  doc["gap_total"] = r.gap_total;
  doc["eta"] = r.eta;
  const fs::path path = dir / "bounds.json";
  write_json(path, doc);
  return {path};
}

std::vector<fs::path> emit_oracle(std::span<const GapCheckRow> rows, Format format,
                                  const fs::path& dir) {
  prepare_dir(dir);
  if (format == Format::kCsv) {
    const fs::path path = dir / "oracle.csv";
    OutFile f(path);
    f.stream() << "instance,n_b,vi_gain,vi_gain_refined,eps_disc,alg1_rate,alg1_stderr,v,"
                  "b_over_v,gap,slack,pass\n";
    for (const GapCheckRow& r : rows)
      write_csv_line(f.stream(),
                     std::vector<std::string>{r.id, std::to_string(r.n_b), format_double(r.vi_gain),
                                              format_double(r.vi_gain_refined),
                                              format_double(r.eps_disc), format_double(r.alg1_rate),
                                              format_double(r.alg1_stderr), format_double(r.v),
                                              format_double(r.b_over_v), format_double(r.gap),
                                              format_double(r.slack), r.pass ? "true" : "false"});
    f.close();
    return {path};
  }
  ordered_json arr = ordered_json::array();
  for (const GapCheckRow& r : rows)
    arr.push_back({{"instance", r.id},           {"n_b", r.n_b},
                   {"vi_gain", r.vi_gain},       {"vi_gain_refined", r.vi_gain_refined},
                   {"eps_disc", r.eps_disc},     {"alg1_rate", r.alg1_rate},
                   {"alg1_stderr", r.alg1_stderr}, {"v", r.v},
                   {"b_over_v", r.b_over_v},     {"gap", r.gap},
                   {"slack", r.slack},           {"pass", r.pass}});
  const fs::path path = dir / "oracle.json";
  write_json(path, ordered_json{{"instances", std::move(arr)}});
  return {path};
}

}  // namespace ehpc::cli
