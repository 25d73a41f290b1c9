#pragma once

#include "vilenkin/vc_transform.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vilenkin {

inline constexpr const char* kToolVersion = "0.1.0";

// Malformed input: bad flags, unreadable files, schema violations. Exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Family file:
//   {"p": 2, "family": [{"name": "omega_1",
//                        "cylinders": [{"resolution": 0, "digits": {"0": 1}}]}]}
// Digit keys are decimal positions; the family must have p-1 sets.
WaveletFamily parse_family(const nlohmann::json& doc);
WaveletFamily parse_family_text(const std::string& text);
WaveletFamily parse_family_file(const std::filesystem::path& path);
nlohmann::ordered_json family_to_json(const WaveletFamily& family);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct Report {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  Verdict verdict = Verdict::Fail;
  std::vector<ConditionRecord> conditions;
  // Command-specific tables, emitted after the conditions.
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::optional<double> seconds;
};

nlohmann::ordered_json measure_to_json(const Measure& m);
nlohmann::ordered_json to_json(const Report& report);
// Witnesses are sorted by cell before emission.
std::string emit_report(const Report& report, const std::string& format);

Report verify_report(const WaveletFamily& family, int widen = 0);
Report mra_report(const WaveletFamily& family, int depth, int widen = 0);
Report filters_report(const WaveletFamily& family, int depth, std::optional<int> resolution);

// Exit code 0 iff the verdict is PASS, 1 for FAIL/INCONCLUSIVE and resource
// caps, 2 for input errors. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vilenkin
