#include "vilenkin/cli_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace vilenkin {

using nlohmann::json;
using nlohmann::ordered_json;

// ------------------------------------------------------------ family files

namespace {

int position_of(const std::string& key, const std::string& where) {
  int v = 0;
  auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
  if (key.empty() || ec != std::errc() || end != key.data() + key.size()) {
    throw InputError(where + ": digit key '" + key + "' is not a decimal position");
  }
  return v;
}

int integer_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
  if (!it->is_number_integer()) throw InputError(where + "." + key + ": expected an integer");
  return it->get<int>();
}

void allow_only(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw InputError(where + ": unknown field '" + k + "'");
    }
  }
}

Cylinder parse_cylinder_record(const json& rec, int p, const std::string& where) {
  if (!rec.is_object()) throw InputError(where + ": expected an object");
  allow_only(rec, {"resolution", "digits"}, where);
  const int resolution = integer_field(rec, "resolution", where);
  std::map<int, int> digits;
  if (auto it = rec.find("digits"); it != rec.end()) {
    if (!it->is_object()) throw InputError(where + ".digits: expected an object");
    for (const auto& [key, value] : it->items()) {
      const std::string at = where + ".digits[\"" + key + "\"]";
      const int pos = position_of(key, at);
      if (!value.is_number_integer()) throw InputError(at + ": expected an integer digit");
      const int d = value.get<int>();
      if (d < 0 || d >= p) throw InputError(at + ": digit " + std::to_string(d) + " is not below p = " + std::to_string(p));
      if (pos > resolution && d != 0) {
        throw InputError(at + ": position " + std::to_string(pos) + " lies above resolution " + std::to_string(resolution));
      }
      digits[pos] = d;
    }
  }
  return Cylinder(p, resolution, digits);
}

}  // namespace

WaveletFamily parse_family(const json& doc) {
  if (!doc.is_object()) throw InputError("family file: expected a JSON object");
  allow_only(doc, {"p", "family", "comment"}, "family file");
  const int p = integer_field(doc, "p", "family file");
  try {
    check_base(p);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("p: ") + e.what());
  }
  auto fam = doc.find("family");
  if (fam == doc.end() || !fam->is_array()) throw InputError("family: expected an array");
  if (fam->size() != static_cast<std::size_t>(p - 1)) {
    throw InputError("family: expected p-1 = " + std::to_string(p - 1) + " sets, got " + std::to_string(fam->size()));
  }
  std::vector<NamedSet> sets;
  for (std::size_t u = 0; u < fam->size(); ++u) {
    const std::string where = "family[" + std::to_string(u) + "]";
    const json& entry = (*fam)[u];
    if (!entry.is_object()) throw InputError(where + ": expected an object");
    allow_only(entry, {"name", "cylinders"}, where);
    std::string name = "omega_" + std::to_string(u + 1);
    if (auto it = entry.find("name"); it != entry.end()) {
      if (!it->is_string()) throw InputError(where + ".name: expected a string");
      name = it->get<std::string>();
    }
    auto cyl = entry.find("cylinders");
    if (cyl == entry.end() || !cyl->is_array()) throw InputError(where + ".cylinders: expected an array");
    std::vector<Cylinder> cells;
    for (std::size_t k = 0; k < cyl->size(); ++k) {
      const std::string at = where + ".cylinders[" + std::to_string(k) + "]";
      Cylinder c = parse_cylinder_record((*cyl)[k], p, at);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].intersects(c)) {
          throw InputError(at + ": " + (cells[i] == c ? "duplicates" : "overlaps") + " cylinders[" + std::to_string(i) + "]");
        }
      }
      cells.push_back(c);
    }
    sets.push_back({name, PSet::from_disjoint(p, cells).canonical()});
  }
  return WaveletFamily(p, std::move(sets));
}

WaveletFamily parse_family_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(e.what());
  }
  return parse_family(doc);
}

WaveletFamily parse_family_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_family_text(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

namespace {

ordered_json cylinder_to_json(const Cylinder& c) {
  ordered_json digits = ordered_json::object();
  const auto& a = c.anchor();
  if (!a.is_identity()) {
    for (int q = a.support_lo(); q <= a.support_hi(); ++q) {
      if (a.digit(q) != 0) digits[std::to_string(q)] = a.digit(q);
    }
  }
  return {{"resolution", c.resolution()}, {"digits", digits}};
}

ordered_json cells_to_json(const PSet& set) {
  ordered_json out = ordered_json::array();
  for (const auto& c : set.cylinders()) out.push_back(format_cylinder(c));
  return out;
}

ordered_json lambda_to_json(const BigInt& n) {
  if (n <= BigInt(std::numeric_limits<std::int64_t>::max())) return n.convert_to<std::int64_t>();
  return n.str();
}

ordered_json value_to_json(std::complex<double> v) {
  if (v.imag() == 0.0) return v.real();
  return ordered_json::array({v.real(), v.imag()});
}

}  // namespace

ordered_json family_to_json(const WaveletFamily& family) {
  ordered_json sets = ordered_json::array();
  for (const auto& s : family.sets()) {
    ordered_json cells = ordered_json::array();
    for (const auto& c : s.set.cylinders()) cells.push_back(cylinder_to_json(c));
    sets.push_back({{"name", s.name}, {"cylinders", cells}});
  }
  return {{"p", family.p()}, {"family", sets}};
}

// ------------------------------------------------------------ reports

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "FAIL";
}

ordered_json measure_to_json(const Measure& m) { return {{"exact", m.to_string()}, {"approx", m.to_double()}}; }

namespace {

std::vector<Witness> sorted_witnesses(std::vector<Witness> ws) {
  std::stable_sort(ws.begin(), ws.end(), [](const Witness& a, const Witness& b) {
    if (a.cell.has_value() != b.cell.has_value()) return !a.cell.has_value();
    return a.cell && *a.cell < *b.cell;
  });
  return ws;
}

ordered_json condition_to_json(const ConditionRecord& c) {
  ordered_json w = ordered_json::array();
  for (const auto& x : sorted_witnesses(c.witnesses)) {
    ordered_json item{{"kind", x.kind}};
    item["cell"] = x.cell ? ordered_json(format_cylinder(*x.cell)) : ordered_json(nullptr);
    item["detail"] = x.detail;
    w.push_back(item);
  }
  ordered_json m = ordered_json::object();
  for (const auto& [name, value] : c.measures) m[name] = measure_to_json(value);
  ordered_json out{{"name", c.name}, {"passed", c.passed}, {"exact", c.exact}, {"witnesses", w}, {"measures", m}};
  if (!c.counts.empty()) {
    ordered_json k = ordered_json::object();
    for (const auto& [name, value] : c.counts) k[name] = value;
    out["counts"] = k;
  }
  return out;
}

std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("exact")) return v["exact"].get<std::string>();
  return v.dump();
}

}  // namespace

ordered_json to_json(const Report& report) {
  ordered_json out;
  out["tool"] = "vilenkin";
  out["version"] = kToolVersion;
  out["command"] = report.command;
  out["parameters"] = report.parameters;
  out["verdict"] = to_string(report.verdict);
  ordered_json conds = ordered_json::array();
  for (const auto& c : report.conditions) conds.push_back(condition_to_json(c));
  out["conditions"] = conds;
  if (!report.details.empty()) out["details"] = report.details;
  if (report.seconds) out["timing"] = {{"seconds", *report.seconds}};
  return out;
}

std::string emit_report(const Report& report, const std::string& format) {
  if (format == "json") return to_json(report).dump(2) + "\n";
  if (format != "text") throw InputError("--format " + format + " does not apply to " + report.command);
  const auto doc = to_json(report);
  std::ostringstream out;
  out << "vilenkin " << kToolVersion << " " << report.command << "\n";
  out << "parameters:";
  for (const auto& [k, v] : report.parameters.items()) out << " " << k << "=" << scalar_text(v);
  out << "\nverdict: " << to_string(report.verdict) << "\n";
  for (const auto& c : doc["conditions"]) {
    out << (c["passed"].get<bool>() ? "[pass] " : "[FAIL] ") << c["name"].get<std::string>()
        << (c["exact"].get<bool>() ? " (exact)" : " (tolerance)") << "\n";
    for (const auto& [k, m] : c["measures"].items()) {
      out << "  " << k << " = " << m["exact"].get<std::string>() << " (" << m["approx"].dump() << ")\n";
    }
    if (c.contains("counts")) {
      for (const auto& [k, n] : c["counts"].items()) out << "  " << k << " = " << n.dump() << "\n";
    }
    for (const auto& w : c["witnesses"]) {
      out << "  witness " << w["kind"].get<std::string>();
      if (!w["cell"].is_null()) out << " at " << w["cell"].get<std::string>();
      if (!w["detail"].get<std::string>().empty()) out << ": " << w["detail"].get<std::string>();
      out << "\n";
    }
  }
  for (const auto& [k, v] : report.details.items()) {
    if (v.is_array()) {
      out << k << ":\n";
      for (const auto& row : v) {
        out << " ";
        if (row.is_object()) {
          for (const auto& [rk, rv] : row.items()) out << " " << rk << "=" << scalar_text(rv);
        } else {
          out << " " << scalar_text(row);
        }
        out << "\n";
      }
    } else {
      out << k << ": " << scalar_text(v) << "\n";
    }
  }
  if (report.seconds) out << "timing: " << *report.seconds << " s\n";
  return out.str();
}

Report verify_report(const WaveletFamily& family, int widen) {
  Report r;
  r.command = "verify";
  r.parameters = {{"p", family.p()}, {"L", family.resolution()}, {"widen", widen}};
  CheckOptions options;
  options.widen = widen;
  auto v = is_wavelet_set(family, options);
  r.verdict = v.overall ? Verdict::Pass : Verdict::Fail;
  r.conditions = v.conditions;
  if (v.overall) {
    ordered_json cert = ordered_json::array();
    for (std::size_t u = 0; u < v.certificate.size(); ++u) {
      for (const auto& piece : v.certificate[u]) {
        cert.push_back({{"set", family.sets()[u].name},
                        {"lambda", lambda_to_json(piece.lambda)},
                        {"shift", format_element(piece.shift)},
                        {"cells", cells_to_json(piece.piece)}});
      }
    }
    r.details["certificate"] = cert;
  }
  return r;
}

namespace {

inline constexpr const char* kMraCondition = "mra_condition";

ConditionRecord mra_record(const MraReport& m, const OmegaSigma& omega) {
  ConditionRecord rec;
  rec.name = kMraCondition;
  rec.passed = m.verdict != MraVerdict::Fail;
  for (const auto& row : m.rows) {
    if (row.passed) continue;
    rec.witnesses.push_back({"overlap_mismatch", std::nullopt,
                             "shift " + format_element(row.shift) + " overlap " + row.overlap.to_string() + " expected " +
                                 row.expected.to_string()});
  }
  rec.measures.push_back({"truncated", measure(omega.truncated)});
  rec.measures.push_back({"tail_bound", omega.tail_bound});
  rec.measures.push_back({"band", m.band});
  rec.counts.push_back({"candidates", m.rows.size()});
  return rec;
}

ordered_json mra_rows(const MraReport& m) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : m.rows) {
    ordered_json r{{"lambda", lambda_to_json(row.lambda)},
                   {"shift", format_element(row.shift)},
                   {"overlap", measure_to_json(row.overlap)},
                   {"expected", measure_to_json(row.expected)}};
    if (row.closure_overlap) r["closure_overlap"] = measure_to_json(*row.closure_overlap);
    r["passed"] = row.passed;
    rows.push_back(r);
  }
  return rows;
}

Verdict from_mra(MraVerdict v) {
  switch (v) {
    case MraVerdict::Certified: return Verdict::Pass;
    case MraVerdict::Inconclusive: return Verdict::Inconclusive;
    case MraVerdict::Fail: return Verdict::Fail;
  }
  return Verdict::Fail;
}

ordered_json table_to_json(const FilterTable& t) {
  ordered_json pieces = ordered_json::array();
  for (const auto& piece : t.pieces()) pieces.push_back({{"value", value_to_json(piece.value)}, {"cells", cells_to_json(piece.region)}});
  return {{"pieces", pieces}, {"unresolved", cells_to_json(t.unresolved())}};
}

}  // namespace

Report mra_report(const WaveletFamily& family, int depth, int widen) {
  Report r = verify_report(family, widen);
  r.command = "mra";
  r.parameters = {{"p", family.p()}, {"L", family.resolution()}, {"J", depth}, {"widen", widen}};
  r.details = ordered_json::object();
  if (r.verdict != Verdict::Pass) return r;
  auto omega = accumulate_omega_sigma(family, depth);
  auto m = check_mra_condition(omega, widen);
  r.conditions.push_back(mra_record(m, omega));
  r.verdict = from_mra(m.verdict);
  r.details["mra_verdict"] = to_string(m.verdict);
  r.details["self_similar"] = m.self_similar;
  r.details["certified_by_depth"] = m.certified_by_depth;
  r.details["rows"] = mra_rows(m);
  return r;
}

Report filters_report(const WaveletFamily& family, int depth, std::optional<int> resolution) {
  Report r = mra_report(family, depth, 0);
  r.command = "filters";
  const int L = resolution.value_or(std::max(1, family.resolution()));
  r.parameters = {{"p", family.p()}, {"L", L}, {"J", depth}};
  if (r.verdict == Verdict::Fail) {
    r.details = ordered_json::object();
    return r;
  }
  const Verdict mra = r.verdict;
  auto omega = accumulate_omega_sigma(family, depth);
  auto filters = build_filters(family, omega);
  auto fi = verify_filter_identities(filters, L, omega.tail_bound);
  auto ts = verify_two_scale(family, omega, filters);
  auto cal = verify_calderon(family, omega);
  for (const auto& c : fi.relations) r.conditions.push_back(c);
  for (const auto& c : ts.relations) r.conditions.push_back(c);
  r.conditions.push_back(cal);
  const bool ok = fi.passed && ts.passed && cal.passed;
  r.verdict = !ok ? Verdict::Fail : mra;
  r.details = ordered_json::object();
  r.details["mra_verdict"] = mra == Verdict::Pass ? "CERTIFIED" : "INCONCLUSIVE";
  r.details["cells"] = fi.cells;
  r.details["leaves"] = fi.leaves;
  r.details["excluded"] = fi.excluded;
  r.details["excluded_mass"] = measure_to_json(fi.excluded_mass);
  r.details["formulations_agree"] = fi.formulations_agree;
  r.details["two_scale_window"] = ts.window;
  ordered_json wavelet = ordered_json::array();
  for (const auto& t : filters.wavelet) wavelet.push_back(table_to_json(t));
  r.details["scaling_filter"] = table_to_json(filters.scaling);
  r.details["wavelet_filters"] = wavelet;
  return r;
}

// ------------------------------------------------------------ command line

namespace {

struct Options {
  std::optional<int> p;
  std::string input;
  int depth = kDefaultDepth;
  std::optional<int> resolution;
  std::vector<int> window;
  std::vector<int> grid;
  std::string output;
  std::string format;
  double tolerance = kGramTolerance;
  int widen = 0;
  int set = 1;
  bool scaling = false;
  bool inverse = false;
  bool timing = false;
  std::uint64_t budget = 1'000'000;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--p", o.p, "Base p (checked against the input file)");
  cmd->add_option("--output", o.output, "Write to FILE instead of stdout");
  cmd->add_option("--format", o.format, "json|text for reports, csv for signals")
      ->check(CLI::IsMember({"json", "text", "csv"}));
  cmd->add_flag("--timing", o.timing, "Record wall time in the report");
}

WaveletFamily load_family(const Options& o) {
  auto family = parse_family_file(o.input);
  if (o.p && *o.p != family.p()) {
    throw InputError("--p " + std::to_string(*o.p) + " disagrees with p = " + std::to_string(family.p()) + " in " + o.input);
  }
  return family;
}

QuotientGrid grid_from(const Options& o, int p) {
  if (o.grid.size() != 2) throw InputError("--grid takes M N");
  try {
    return QuotientGrid(p, o.grid[0], o.grid[1]);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--grid: ") + e.what());
  }
}

std::string signal_csv(const GridSignal& s) {
  std::ostringstream out;
  write_csv(s, out);
  return out.str();
}

struct Outcome {
  int code;
  std::string text;
};

Outcome report_outcome(Report r, const Options& o, std::chrono::steady_clock::time_point start) {
  if (o.timing) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {r.verdict == Verdict::Pass ? 0 : 1, emit_report(r, o.format.empty() ? "json" : o.format)};
}

Outcome dispatch(const std::string& command, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  if (command == "verify") return report_outcome(verify_report(load_family(o), o.widen), o, start);
  if (command == "mra") return report_outcome(mra_report(load_family(o), o.depth, o.widen), o, start);
  if (command == "filters") return report_outcome(filters_report(load_family(o), o.depth, o.resolution), o, start);
  if (command == "search") {
    if (!o.p) throw InputError("search needs --p");
    if (o.window.size() != 2) throw InputError("search needs --window LO HI");
    const int L = o.resolution.value_or(1);
    auto result = search_wavelet_sets(*o.p, o.window[0], o.window[1], L, o.budget);
    Report r;
    r.command = "search";
    r.parameters = {{"p", *o.p}, {"L", L}, {"window", o.window}, {"budget", o.budget}};
    r.verdict = result.exhausted ? Verdict::Inconclusive : Verdict::Pass;
    r.details["examined"] = result.examined;
    r.details["budget_exhausted"] = result.exhausted;
    ordered_json found = ordered_json::array();
    for (const auto& f : result.families) found.push_back(family_to_json(f));
    r.details["families"] = found;
    return report_outcome(r, o, start);
  }
  if (!o.format.empty() && o.format != "csv") throw InputError(command + " writes csv");
  if (command == "synthesize") {
    auto family = load_family(o);
    const int p = family.p();
    if (o.scaling) {
      auto omega = accumulate_omega_sigma(family, o.depth);
      auto grid = o.grid.empty() ? required_grid(omega.closure.canonical()) : grid_from(o, p);
      return {0, signal_csv(synthesize_scaling(omega, grid))};
    }
    if (o.set < 1 || o.set >= p) throw InputError("--set must lie in [1, " + std::to_string(p - 1) + "]");
    const PSet& set = family.set(o.set);
    auto grid = o.grid.empty() ? required_grid(set) : grid_from(o, p);
    return {0, signal_csv(synthesize_wavelet(set, grid))};
  }
  // transform
  if (!o.p) throw InputError("transform needs --p");
  auto grid = grid_from(o, *o.p);
  std::ifstream in(o.input);
  if (!in) throw InputError(o.input + ": cannot open");
  GridSignal s = [&] {
    try {
      return read_csv(in, grid, o.inverse);
    } catch (const std::invalid_argument& e) {
      throw InputError(o.input + ": " + e.what());
    }
  }();
  GridSignal t = o.inverse ? inverse(s) : forward(s);
  GridSignal back = o.inverse ? forward(t) : inverse(t);
  double err = max_abs_difference(back, s);
  if (err > o.tolerance) {
    return {1, "round trip error " + std::to_string(err) + " exceeds tolerance\n"};
  }
  return {0, signal_csv(t)};
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact verification of wavelet sets on Vilenkin groups", "vilenkin"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("vilenkin ") + kToolVersion);

  auto* verify = app.add_subcommand("verify", "Check the wavelet-set conditions");
  auto* mra = app.add_subcommand("mra", "Verify, then decide the MRA condition");
  auto* filters = app.add_subcommand("filters", "Build the filters and check their identities");
  auto* synth = app.add_subcommand("synthesize", "Sample a wavelet or the scaling function as CSV");
  auto* transform = app.add_subcommand("transform", "Forward or inverse transform of a CSV signal");
  auto* search = app.add_subcommand("search", "Enumerate wavelet sets in a digit window");

  for (auto* cmd : {verify, mra, filters, synth}) {
    add_common(cmd, o);
    cmd->add_option("--input", o.input, "Family file")->required()->check(CLI::ExistingFile);
  }
  for (auto* cmd : {verify, mra}) cmd->add_option("--widen", o.widen, "Extra dilation and translation steps")->check(CLI::NonNegativeNumber);
  for (auto* cmd : {mra, filters, synth}) cmd->add_option("--depth", o.depth, "Dilation depth J")->check(CLI::PositiveNumber);
  filters->add_option("--resolution", o.resolution, "Cell resolution L")->check(CLI::PositiveNumber);
  synth->add_option("--grid", o.grid, "Grid depths M N")->expected(2);
  synth->add_option("--set", o.set, "Wavelet index u");
  synth->add_flag("--scaling", o.scaling, "Sample the scaling function instead");

  add_common(transform, o);
  transform->add_option("--input", o.input, "CSV signal")->required()->check(CLI::ExistingFile);
  transform->add_option("--grid", o.grid, "Grid depths M N")->required()->expected(2);
  transform->add_flag("--inverse", o.inverse, "Input is a spectrum");
  transform->add_option("--tolerance", o.tolerance, "Round-trip tolerance");

  add_common(search, o);
  search->add_option("--window", o.window, "Digit positions LO HI")->required()->expected(2);
  search->add_option("--resolution", o.resolution, "Cell resolution L");
  search->add_option("--budget", o.budget, "Maximum candidates examined");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "vilenkin " << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  for (auto* cmd : {verify, mra, filters, synth, transform, search}) {
    if (!cmd->parsed()) continue;
    try {
      Outcome result = dispatch(cmd->get_name(), o);
      const bool is_report = cmd != synth && cmd != transform;
      if (o.output.empty() || (!is_report && result.code != 0)) {
        (is_report || result.code == 0 ? out : err) << result.text;
      } else {
        std::ofstream file(o.output);
        if (!file) throw InputError(o.output + ": cannot write");
        file << result.text;
      }
      return result.code;
    } catch (const InputError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const AliasingError& e) {
      err << "error: " << e.what() << " (try --grid " << e.required_M << " " << e.required_N << ")\n";
      return 1;
    } catch (const ResolutionLimitError& e) {
      err << "error: resource cap: " << e.what() << "\n";
      return 1;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 2;
}

}  // namespace vilenkin
