#pragma once

#include <string>
#include <vector>

namespace pxl {

enum class CheckStatus { kPass, kFail, kIndeterminate };

const char* to_string(CheckStatus s);

struct ValidationEntry {
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::string witness;
  double value = 0.0;
};

/// Per-condition outcomes of a hypothesis check. Never throws on a failed
/// condition; failures are entries.
struct ValidationReport {
  std::vector<ValidationEntry> entries;

  void add(std::string name, bool ok, std::string witness = {}, double value = 0.0) {
    entries.push_back({std::move(name), ok ? CheckStatus::kPass : CheckStatus::kFail,
                       std::move(witness), value});
  }
  void add(ValidationEntry e) { entries.push_back(std::move(e)); }

  bool passed() const {
    for (const auto& e : entries) {
      if (e.status == CheckStatus::kFail) return false;
    }
    return true;
  }

  const ValidationEntry* find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }

  /// Status of the named entry; kIndeterminate when absent.
  CheckStatus status(const std::string& name) const {
    const ValidationEntry* e = find(name);
    return e ? e->status : CheckStatus::kIndeterminate;
  }
};

}  // namespace pxl
