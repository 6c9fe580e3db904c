// Evaluation report rendering: machine-readable JSON and an aligned
// plain-text table (rows = metric, columns = method).

#ifndef MAG_REPORT_IO_HPP
#define MAG_REPORT_IO_HPP

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "mag/eval.hpp"

namespace mag {

inline nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json methods = nlohmann::json::object();
  for (const auto& [name, result] : report.per_method) {
    nlohmann::json entry = {{"f1", result.f1},
                            {"bacc", result.bacc},
                            {"confusion",
                             {{"tp", result.confusion.tp},
                              {"fp", result.confusion.fp},
                              {"tn", result.confusion.tn},
                              {"fn", result.confusion.fn}}}};
    if (result.f1_degenerate) entry["f1_degenerate"] = true;
    methods[name] = std::move(entry);
  }
  return nlohmann::json{{"methods", std::move(methods)},
                        {"cohort_size", report.cohort_size},
                        {"positive_count", report.positive_count}};
}

inline std::string render_report_table(const EvalReport& report) {
  static constexpr std::array<const char*, 3> kMethods = {"counting",
                                                          "averaging", "mag"};
  const auto fmt = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };

  std::string out;
  out += "Metric    Counting   Averaging  MAg\n";
  for (const char* metric : {"F1", "BACC"}) {
    char row[96];
    std::array<std::string, 3> cells;
    for (std::size_t k = 0; k < kMethods.size(); ++k) {
      const auto it = report.per_method.find(kMethods[k]);
      const bool present = it != report.per_method.end();
      const double value = !present ? 0.0
                           : std::string(metric) == "F1" ? it->second.f1
                                                         : it->second.bacc;
      cells[k] = present ? fmt(value) : "-";
    }
    std::snprintf(row, sizeof(row), "%-9s %-10s %-10s %s\n", metric,
                  cells[0].c_str(), cells[1].c_str(), cells[2].c_str());
    out += row;
  }
  out += "patients: " + std::to_string(report.cohort_size) +
         " (MSIMUT: " + std::to_string(report.positive_count) + ")\n";
  return out;
}

}  // namespace mag

#endif  // MAG_REPORT_IO_HPP
