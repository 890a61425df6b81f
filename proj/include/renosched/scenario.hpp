#pragma once

// A scenario is the set of simultaneously active projects; it is the unit of
// traffic simulation and caching.

#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "renosched/error.hpp"
#include "renosched/network.hpp"

namespace renosched {

class Scenario {
 public:
  Scenario() = default;
  explicit Scenario(std::size_t num_projects)
      : size_(num_projects), words_((num_projects + 63) / 64, 0) {}

  static Scenario from_bitstring(const std::string& bits) {
    Scenario s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') s.set(i);
      else if (bits[i] != '0') throw Error("scenario bitstring must contain only 0 and 1");
    }
    return s;
  }

  std::size_t size() const noexcept { return size_; }

  bool test(std::size_t p) const { return (words_[p / 64] >> (p % 64)) & 1u; }
  void set(std::size_t p) { words_.at(p / 64) |= std::uint64_t{1} << (p % 64); }
  void reset(std::size_t p) { words_.at(p / 64) &= ~(std::uint64_t{1} << (p % 64)); }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const noexcept { return count() == 0; }

  bool is_subset_of(const Scenario& other) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  std::vector<int> projects() const {
    std::vector<int> out;
    for (std::size_t p = 0; p < size_; ++p)
      if (test(p)) out.push_back(static_cast<int>(p));
    return out;
  }

  // Bit p is character p.
  std::string bitstring() const {
    std::string s(size_, '0');
    for (std::size_t p = 0; p < size_; ++p)
      if (test(p)) s[p] = '1';
    return s;
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ size_;
    for (auto w : words_) {
      h ^= w;
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }

  bool operator==(const Scenario&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ScenarioHash {
  std::size_t operator()(const Scenario& s) const noexcept { return s.hash(); }
};

// Exact simulation of one scenario, returning system travel time.
using SimulateFn = std::function<double(const Scenario&)>;

// Scenario -> simulated system travel time (vehicle-minutes). Insert-once:
// a scenario's value never changes after the first insert. Reads may run
// concurrently with a writer.
class ScenarioCache {
 public:
  explicit ScenarioCache(std::size_t num_projects = 0) : num_projects_(num_projects) {}

  ScenarioCache(const ScenarioCache& o) : num_projects_(o.num_projects_) {
    std::shared_lock lock(o.mutex_);
    map_ = o.map_;
    order_ = o.order_;
    base_ = o.base_;
  }

  ScenarioCache& operator=(const ScenarioCache& o) {
    if (this == &o) return *this;
    std::scoped_lock lock(mutex_, o.mutex_);
    num_projects_ = o.num_projects_;
    map_ = o.map_;
    order_ = o.order_;
    base_ = o.base_;
    return *this;
  }

  std::size_t num_projects() const noexcept { return num_projects_; }

  // Returns false (and leaves the entry untouched) if already present.
  bool insert(const Scenario& s, double stt) {
    if (s.size() != num_projects_) throw Error("scenario width does not match cache");
    std::unique_lock lock(mutex_);
    auto [it, inserted] = map_.emplace(s, stt);
    if (!inserted) return false;
    order_.push_back(s);
    if (s.empty()) base_ = stt;
    return true;
  }

  std::optional<double> find(const Scenario& s) const {
    std::shared_lock lock(mutex_);
    auto it = map_.find(s);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const Scenario& s) const { return find(s).has_value(); }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return map_.size();
  }

  bool has_base() const {
    std::shared_lock lock(mutex_);
    return base_.has_value();
  }

  double base_stt() const {
    std::shared_lock lock(mutex_);
    if (!base_) throw Error("scenario cache has no empty-scenario entry");
    return *base_;
  }

  // Entries in insertion order.
  std::vector<std::pair<Scenario, double>> entries() const {
    std::shared_lock lock(mutex_);
    std::vector<std::pair<Scenario, double>> out;
    out.reserve(order_.size());
    for (const Scenario& s : order_) out.emplace_back(s, map_.at(s));
    return out;
  }

  // Calls f(scenario, stt) for each entry in insertion order, under a read lock.
  template <typename F>
  void for_each(F&& f) const {
    std::shared_lock lock(mutex_);
    for (const Scenario& s : order_) f(s, map_.at(s));
  }

  void save_csv(std::ostream& out) const {
    out << "bitstring,stt\n";
    for_each([&](const Scenario& s, double v) { out << s.bitstring() << ',' << detail::format_double(v) << '\n'; });
  }

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    save_csv(out);
  }

  static ScenarioCache load_csv(std::istream& in, std::size_t num_projects) {
    ScenarioCache c(num_projects);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "bitstring,stt") continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ParseError(line_no, "expected bitstring,stt");
      Scenario s = Scenario::from_bitstring(line.substr(0, comma));
      if (s.size() != num_projects) throw ParseError(line_no, "bitstring width mismatch");
      c.insert(s, detail::parse_double(line.substr(comma + 1), line_no));
    }
    return c;
  }

 private:
  std::size_t num_projects_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<Scenario, double, ScenarioHash> map_;
  std::vector<Scenario> order_;
  std::optional<double> base_;
};

}  // namespace renosched
