#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "greedy/experiment.hpp"
#include "greedy/json_io.hpp"

namespace greedy {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_cell(const json& v) {
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return fmt(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  return s;
}

std::string xml_escape(const std::string& s) {
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

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << bytes;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_cell(t.columns[i]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  return out;
}

std::string plot_svg(const Plot& p) {
  const double W = 640, H = 420, left = 70, right = 170, top = 40, bottom = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : p.series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (const auto* ys : {&s.y, &s.lo, &s.hi}) {
      for (double v : *ys) {
        if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
      }
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto X = [&](double v) { return left + (v - x0) / (x1 - x0) * (W - left - right); };
  auto Y = [&](double v) { return H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom); };
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(p.title) << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    o << "<text x=\"" << fmt(X(xv)) << "\" y=\"" << H - bottom + 15 << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    o << "<text x=\"" << left - 5 << "\" y=\"" << fmt(Y(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xml_escape(p.xlabel) << "</text>\n";
  o << "<text x=\"15\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << (top + H - bottom) / 2 << ")\">" << xml_escape(p.ylabel) << "</text>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* c = colours[k % 7];
    if (s.lo.size() == s.x.size() && s.hi.size() == s.x.size() && !s.x.empty()) {
      o << "<polygon fill=\"" << c << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) o << fmt(X(s.x[i])) << "," << fmt(Y(s.hi[i])) << " ";
      for (std::size_t i = s.x.size(); i-- > 0;) o << fmt(X(s.x[i])) << "," << fmt(Y(s.lo[i])) << " ";
      o << "\"/>\n";
    }
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i])) << " ";
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      o << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i])) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
    }
    const double ly = top + 15.0 * k;
    o << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - right + 35 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_artifacts(const std::string& out_dir, const ExperimentOutcome& outcome, const json& config,
                     const std::string& subcommand, int jobs) {
  const fs::path root(out_dir);
  fs::create_directories(root / "tables");
  fs::create_directories(root / "plots");
  json files = json::array();
  auto emit = [&](const std::string& rel, const std::string& bytes) {
    write_file(root / rel, bytes);
    files.push_back({{"path", rel}, {"fnv1a64", hex64(fnv1a64(bytes))}});
  };
  const std::string report = canonical_dump(outcome.report);
  emit("report.json", report);
  for (const auto& t : outcome.tables) emit("tables/" + t.name + ".csv", table_csv(t));
  for (const auto& p : outcome.plots) emit("plots/" + p.name + ".svg", plot_svg(p));
  const json manifest = {{"tool", "greedymass"},
                         {"tool_version", kToolVersion},
                         {"subcommand", subcommand},
                         {"config", config},
                         {"config_hash", hex64(fnv1a64(canonical_dump(config)))},
                         {"seed", outcome.seed},
                         {"jobs", jobs},
                         {"exit_code", outcome.exit_code},
                         {"report_hash", hex64(fnv1a64(report))},
                         {"files", files}};
  write_file(root / "manifest.json", canonical_dump(manifest));
}

ReplayResult replay(const std::string& manifest_path, int jobs, std::optional<std::uint64_t> seed_override,
                    const std::optional<std::string>& out_dir) {
  const auto text = read_file(manifest_path);
  if (!text) return {2, "cannot read manifest " + manifest_path};
  json manifest;
  try {
    manifest = json::parse(*text);
  } catch (const json::exception& e) {
    return {2, "manifest is not valid JSON: " + std::string(e.what())};
  }
  if (!manifest.is_object() || !manifest.contains("config") || !manifest.contains("subcommand") ||
      !manifest.contains("seed") || !manifest["seed"].is_number_unsigned() || !manifest["subcommand"].is_string()) {
    return {2, "manifest lacks config, subcommand or seed"};
  }
  const fs::path dir = fs::path(manifest_path).parent_path();
  const auto original = read_file(dir / "report.json");
  if (!original) return {2, "recorded report.json is missing next to the manifest"};

  const std::uint64_t seed = seed_override ? *seed_override : manifest["seed"].get<std::uint64_t>();
  const std::string sub = manifest["subcommand"].get<std::string>();
  const ExperimentOutcome out = run_experiment(manifest["config"], sub, seed, jobs);
  const std::string target = out_dir ? *out_dir : (dir / "replay").string();
  write_artifacts(target, out, manifest["config"], sub, jobs);
  const std::string fresh = canonical_dump(out.report);
  if (fresh == *original) return {0, "report.json identical (" + hex64(fnv1a64(fresh)) + ")"};
  return {1, "report.json differs: recorded " + hex64(fnv1a64(*original)) + ", replayed " + hex64(fnv1a64(fresh))};
}

}  // namespace greedy
