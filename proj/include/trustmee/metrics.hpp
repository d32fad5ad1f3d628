// Copyright 2026 The TrustMee Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRUSTMEE_METRICS_HPP_
#define TRUSTMEE_METRICS_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>

namespace trustmee::metrics {

// Counter and latency-stat registry; rendered as "name value" text lines.
class Registry {
 public:
  void inc(std::string_view name, uint64_t delta = 1) {
    std::lock_guard lock(mu_);
    counters_[std::string(name)] += delta;
  }

  uint64_t get(std::string_view name) const {
    std::lock_guard lock(mu_);
    auto it = counters_.find(std::string(name));
    return it == counters_.end() ? 0 : it->second;
  }

  void observe_micros(std::string_view name, uint64_t micros) {
    std::lock_guard lock(mu_);
    Stat& s = stats_[std::string(name)];
    ++s.count;
    s.sum += micros;
    if (micros < s.min) s.min = micros;
    if (micros > s.max) s.max = micros;
  }

  std::string render_text() const {
    std::lock_guard lock(mu_);
    std::ostringstream out;
    for (const auto& [name, value] : counters_) {
      out << name << " " << value << "\n";
    }
    for (const auto& [name, s] : stats_) {
      out << name << ".count " << s.count << "\n";
      out << name << ".sum_micros " << s.sum << "\n";
      out << name << ".min_micros " << (s.count ? s.min : 0) << "\n";
      out << name << ".max_micros " << s.max << "\n";
    }
    return out.str();
  }

  void reset() {
    std::lock_guard lock(mu_);
    counters_.clear();
    stats_.clear();
  }

 private:
  struct Stat {
    uint64_t count = 0;
    uint64_t sum = 0;
    uint64_t min = UINT64_MAX;
    uint64_t max = 0;
  };

  mutable std::mutex mu_;
  std::map<std::string, uint64_t> counters_;
  std::map<std::string, Stat> stats_;
};

}  // namespace trustmee::metrics

#endif  // TRUSTMEE_METRICS_HPP_
