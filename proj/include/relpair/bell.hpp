#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relpair/errors.hpp"
#include "relpair/kinematics.hpp"
#include "relpair/polarization.hpp"
#include "relpair/rng.hpp"
#include "relpair/text.hpp"

// Monte Carlo CHSH harness: two measurement stations with independently
// chosen settings, per-trial records that can be merged after the fact, and
// the local-hidden-variable bound to compare against.
//
// Spacelike-separated measurements are simulated sequentially; the joint
// statistics are provably order-independent, and the order flag below exists
// so tests can demonstrate that rather than assume it.

namespace relpair {

enum class Setting { A, B };

inline char setting_code(Setting s) { return s == Setting::A ? 'a' : 'b'; }

/// One station's result in one trial. ct_stamp is the time coordinate of the
/// station's measurement event in the analysis frame; statistics never read
/// it, which is the point the boosted re-stamping tests make.
struct TrialRecord {
  std::int64_t trial_id;
  int station;  // 1 or 2
  Setting setting;
  int value;  // +1 or -1
  double ct_stamp;
};

/// The two observables per station. Station-1 chooses between a1/b1,
/// station-2 between a2/b2; all must be +/-1-valued for CHSH.
struct OperatorSet {
  SinglePhotonOp a1;
  SinglePhotonOp b1;
  SinglePhotonOp a2;
  SinglePhotonOp b2;

  /// The maximal-violation settings for the singlet:
  /// a1 = sigma3, b1 = sigma1, a2 = -(sigma1+sigma3)/sqrt2,
  /// b2 = (sigma1-sigma3)/sqrt2.
  static OperatorSet chsh_optimal() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {SinglePhotonOp::sigma3(), SinglePhotonOp::sigma1(),
            -r * (SinglePhotonOp::sigma1() + SinglePhotonOp::sigma3()),
            r * (SinglePhotonOp::sigma1() - SinglePhotonOp::sigma3())};
  }

  const SinglePhotonOp& station1(Setting s) const { return s == Setting::A ? a1 : b1; }
  const SinglePhotonOp& station2(Setting s) const { return s == Setting::A ? a2 : b2; }
};

/// Measurement events of the two stations, used only for ct_stamps.
/// Defaults put them at the spacelike-separated pair x = +/-1, ct = 1.
struct StationEvents {
  Event station1{1.0, 1.0};
  Event station2{-1.0, 1.0};

  const Event& of(int station) const { return station == 1 ? station1 : station2; }
};

struct RunOptions {
  bool station2_first = false;
  std::optional<std::pair<Setting, Setting>> forced_settings;
  StationEvents events{};
};

/// Run n trials: fresh singlet each trial, one uniform settings draw per
/// station, projective measurement of the selected observables. The settings
/// lane and the outcome lane are separate seeds, and every trial derives its
/// own substream of each, so trial i's results do not depend on n or on the
/// other trials.
inline std::vector<TrialRecord> run_trials(std::int64_t n, std::uint64_t settings_seed,
                                           std::uint64_t outcome_seed,
                                           const OperatorSet& ops = OperatorSet::chsh_optimal(),
                                           const RunOptions& opt = {}) {
  if (n < 1) throw std::domain_error("need at least one trial");
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(2 * n));
  for (std::int64_t i = 0; i < n; ++i) {
    Rng settings = Rng::derive(settings_seed, static_cast<std::uint64_t>(i));
    Rng outcomes = Rng::derive(outcome_seed, static_cast<std::uint64_t>(i));

    const Setting s1 = opt.forced_settings ? opt.forced_settings->first
                                           : (settings.uniform() < 0.5 ? Setting::A : Setting::B);
    const Setting s2 = opt.forced_settings ? opt.forced_settings->second
                                           : (settings.uniform() < 0.5 ? Setting::A : Setting::B);

    const PolState fresh = PolState::singlet();
    int v1 = 0, v2 = 0;
    if (!opt.station2_first) {
      const OperatorOutcome first = measure_operator(fresh, 1, ops.station1(s1), outcomes);
      const OperatorOutcome second = measure_operator(first.collapsed, 2, ops.station2(s2), outcomes);
      v1 = first.eigenvalue > 0.0 ? 1 : -1;
      v2 = second.eigenvalue > 0.0 ? 1 : -1;
    } else {
      const OperatorOutcome first = measure_operator(fresh, 2, ops.station2(s2), outcomes);
      const OperatorOutcome second = measure_operator(first.collapsed, 1, ops.station1(s1), outcomes);
      v2 = first.eigenvalue > 0.0 ? 1 : -1;
      v1 = second.eigenvalue > 0.0 ? 1 : -1;
    }

    records.push_back({i, 1, s1, v1, opt.events.station1.ct});
    records.push_back({i, 2, s2, v2, opt.events.station2.ct});
  }
  return records;
}

/// Merged per-setting-pair statistics. Correlator order:
/// E(a1,a2), E(a1,b2), E(b1,a2), E(b1,b2);
/// s_value = E(a1,a2) + E(a1,b2) + E(b1,a2) - E(b1,b2).
struct ChshEstimate {
  std::array<double, 4> correlators;
  std::array<std::int64_t, 4> counts;
  std::array<double, 4> std_errors;
  double s_value;
};

inline double chsh_s(const std::array<double, 4>& correlators) {
  return correlators[0] + correlators[1] + correlators[2] - correlators[3];
}

/// Pair up records by trial_id and average value products per setting pair.
/// Rejects duplicate or missing station records and out-of-range fields.
inline ChshEstimate merge_and_estimate(const std::vector<TrialRecord>& records) {
  struct Slot {
    std::optional<TrialRecord> s1;
    std::optional<TrialRecord> s2;
  };
  std::unordered_map<std::int64_t, Slot> open;
  open.reserve(records.size() / 2 + 1);

  std::array<std::int64_t, 4> counts{};
  std::array<std::int64_t, 4> sums{};

  auto consume = [&](const Slot& slot) {
    const int idx = (slot.s1->setting == Setting::A ? 0 : 2) +
                    (slot.s2->setting == Setting::A ? 0 : 1);
    counts[idx] += 1;
    sums[idx] += slot.s1->value * slot.s2->value;
  };

  for (const TrialRecord& r : records) {
    if (r.station != 1 && r.station != 2)
      throw MalformedRecords("station must be 1 or 2 (trial " + std::to_string(r.trial_id) + ")");
    if (r.value != 1 && r.value != -1)
      throw MalformedRecords("value must be +1 or -1 (trial " + std::to_string(r.trial_id) + ")");
    Slot& slot = open[r.trial_id];
    std::optional<TrialRecord>& cell = (r.station == 1) ? slot.s1 : slot.s2;
    if (cell.has_value())
      throw MalformedRecords("duplicate record for trial " + std::to_string(r.trial_id) +
                             " station " + std::to_string(r.station));
    cell = r;
    if (slot.s1 && slot.s2) {
      consume(slot);
      open.erase(r.trial_id);
    }
  }
  if (!open.empty())
    throw MalformedRecords("trial " + std::to_string(open.begin()->first) +
                           " is missing its partner record");

  ChshEstimate est{};
  for (int k = 0; k < 4; ++k) {
    const std::int64_t m = counts[k];
    const double e = (m > 0) ? static_cast<double>(sums[k]) / static_cast<double>(m) : 0.0;
    est.correlators[k] = e;
    est.counts[k] = m;
    // Sample standard error of a mean of +/-1 products.
    est.std_errors[k] = (m > 1) ? std::sqrt((1.0 - e * e) / static_cast<double>(m - 1)) : 0.0;
  }
  est.s_value = chsh_s(est.correlators);
  return est;
}

/// S for one deterministic local strategy: each station pre-assigns +/-1 to
/// each of its settings.
inline double lhv_strategy_s(int a1, int b1, int a2, int b2) {
  for (int v : {a1, b1, a2, b2})
    if (v != 1 && v != -1) throw std::domain_error("strategy values must be +1 or -1");
  return static_cast<double>(a1 * a2 + a1 * b2 + b1 * a2 - b1 * b2);
}

/// Exhaustive max of |S| over all 16 deterministic local strategies: 2.
inline double lhv_max_chsh() {
  double best = 0.0;
  for (int a1 : {-1, 1})
    for (int b1 : {-1, 1})
      for (int a2 : {-1, 1})
        for (int b2 : {-1, 1})
          best = std::max(best, std::abs(lhv_strategy_s(a1, b1, a2, b2)));
  return best;
}

/// Copy of the records with each ct_stamp replaced by the boosted time of
/// that station's measurement event. Settings and values are untouched.
inline std::vector<TrialRecord> restamp_records(std::vector<TrialRecord> records, const Boost& b,
                                                const StationEvents& events) {
  const double ct1 = boost_event(events.station1, b).ct;
  const double ct2 = boost_event(events.station2, b).ct;
  for (TrialRecord& r : records) r.ct_stamp = (r.station == 1) ? ct1 : ct2;
  return records;
}

/// Estimate recomputed from boosted-frame records. Correlators never read
/// timestamps, so the result is field-for-field identical to the unboosted
/// estimate even when the boost reorders the stations in time.
inline ChshEstimate boosted_statistics(const std::vector<TrialRecord>& records, const Boost& b,
                                       const StationEvents& events) {
  return merge_and_estimate(restamp_records(records, b, events));
}

/// Records as CSV with a fixed header; values round-trip exactly.
inline void write_trial_records_csv(const std::vector<TrialRecord>& records, std::ostream& os) {
  os << "trial_id,station,setting,value,ct_stamp\n";
  for (const TrialRecord& r : records) {
    os << r.trial_id << ',' << r.station << ',' << setting_code(r.setting) << ',' << r.value
       << ',' << format_double(r.ct_stamp) << '\n';
  }
}

inline std::vector<TrialRecord> read_trial_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "trial_id,station,setting,value,ct_stamp")
    throw MalformedRecords("record CSV must start with the trial_id,station,... header");
  std::vector<TrialRecord> records;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string, 5> field;
    std::size_t start = 0, idx = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (idx >= field.size())
          throw MalformedRecords("too many columns on line " + std::to_string(line_no));
        field[idx++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (idx != field.size())
      throw MalformedRecords("expected 5 columns on line " + std::to_string(line_no));

    TrialRecord r{};
    try {
      r.trial_id = std::stoll(field[0]);
      r.station = std::stoi(field[1]);
      r.value = std::stoi(field[3]);
      r.ct_stamp = std::stod(field[4]);
    } catch (const std::exception&) {
      throw MalformedRecords("unparseable number on line " + std::to_string(line_no));
    }
    if (field[2] == "a")
      r.setting = Setting::A;
    else if (field[2] == "b")
      r.setting = Setting::B;
    else
      throw MalformedRecords("setting must be a or b on line " + std::to_string(line_no));
    if (r.station != 1 && r.station != 2)
      throw MalformedRecords("station must be 1 or 2 on line " + std::to_string(line_no));
    if (r.value != 1 && r.value != -1)
      throw MalformedRecords("value must be +1 or -1 on line " + std::to_string(line_no));
    records.push_back(r);
  }
  return records;
}

}  // namespace relpair
