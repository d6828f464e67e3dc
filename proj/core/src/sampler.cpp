#include "lbexact/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "lbexact/dominating.hpp"
#include "lbexact/errors.hpp"
#include "lbexact/random.hpp"

namespace lbexact {

std::string_view algorithm_name(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::kAcceptReject: return "ar";
    case Algorithm::kDomCftpEmpty: return "empty";
    case Algorithm::kDomCftpSandwich: return "sandwich";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "ar") return Algorithm::kAcceptReject;
  if (text == "empty") return Algorithm::kDomCftpEmpty;
  if (text == "sandwich") return Algorithm::kDomCftpSandwich;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected ar|empty|sandwich)");
}

BackoffStrategy BackoffStrategy::for_params(const NetworkParams& params) {
  const double c = static_cast<double>(params.servers());
  const double m = std::ceil(c / (c - params.lambda()));
  return {static_cast<std::uint64_t>(std::max(1.0, m))};
}

std::uint64_t BackoffStrategy::depth_for_round(std::uint64_t round) const noexcept {
  if (round == 0) return 0;
  const std::uint64_t shift = round - 1;
  if (shift >= 63 || m1 > (UINT64_MAX >> shift)) return UINT64_MAX;
  return m1 << shift;
}

std::uint64_t DrawSeed::key() const noexcept {
  return derive_key(seed, StreamDomain::kDraw, draw_index, attempt);
}

SandwichMode sandwich_mode(const PolicyDescriptor& policy) {
  switch (policy.kind()) {
    case PolicyKind::kUniformRouting:
    case PolicyKind::kJoinShortest:
    case PolicyKind::kPowerOfD:
      return SandwichMode::kMonotone;
    case PolicyKind::kMmcSteal:
      return SandwichMode::kClassMonotone;
    case PolicyKind::kIdleFirst:
    case PolicyKind::kIdleOneFirst:
      return SandwichMode::kConservative;
    case PolicyKind::kGraphRestricted:
      break;
  }
  throw NonExchangeablePolicy("sandwich bounds need an exchangeable policy, got " + policy.name());
}

bool in_steal_class(std::span<const Length> sorted) noexcept {
  return sorted.empty() || sorted.front() > 0 || sorted.back() < 2;
}

void step_universal_lower(SortedLengths& sorted, Mark mark) {
  if (mark.event == Event::kArrival) {
    raise_level_at(sorted, 0);
  } else if (sorted.back() > 0) {
    lower_level_at(sorted, sorted.size() - 1);
  }
}

namespace {

bool all_zero(std::span<const Length> s) noexcept {
  return std::all_of(s.begin(), s.end(), [](Length v) { return v == 0; });
}

void check_options(const SamplerOptions& options) {
  if (options.max_depth < 1) throw ConfigError("max_depth must be >= 1");
}

Sample make_sample(Algorithm algorithm, DrawSeed seed) {
  Sample s;
  s.algorithm = algorithm;
  s.seed = seed.seed;
  s.draw_index = seed.draw_index;
  return s;
}

void permute(std::vector<Length>& state, std::uint64_t key) {
  CounterStream rng(key, StreamDomain::kPermute, 0);
  for (std::size_t i = state.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(state[i - 1], state[j]);
  }
}

void finish_sorted(Sample& s, SortedLengths sorted, const SamplerOptions& options,
                   std::uint64_t key) {
  s.state = std::move(sorted);
  s.sorted = true;
  if (options.permute_output) {
    permute(s.state, key);
    s.sorted = false;
  }
}

SortedLengths stationary_sorted(const NetworkParams& params, CounterStream& rng) {
  return sorted_lengths(sample_stationary(params, rng).lengths());
}

// Forward replay of marks from the empty state, starting at time `start`,
// through `count` steps; mark_of(t) and u_of(t) supply the randomness.
template <class MarkFn, class UFn>
Sample replay_from_empty(const NetworkParams& params, const PolicyDescriptor& policy,
                         std::int64_t first_time, std::int64_t last_time, MarkFn mark_of,
                         UFn u_of, const SamplerOptions& options, Sample s, std::uint64_t key,
                         SortedLengths* y_final) {
  const std::size_t c = params.servers();
  SortedLengths y(c, 0);
  if (policy.exchangeable() && options.sorted_fast_path) {
    SortedLengths x(c, 0);
    for (std::int64_t t = first_time; t <= last_time; ++t) {
      const Mark m = mark_of(t);
      step_sorted(x, m, u_of(t), policy);
      if (options.verify || y_final != nullptr) {
        step_sorted_ur(y, m);
        if (options.verify && !preorder_leq_sorted(x, y)) {
          throw InvariantViolation("replay lost domination at time " + std::to_string(t));
        }
      }
    }
    if (y_final != nullptr) *y_final = y;
    finish_sorted(s, std::move(x), options, key);
    return s;
  }
  QueueState x = QueueState::empty(c);
  SortedView view = sort_state(x);
  for (std::int64_t t = first_time; t <= last_time; ++t) {
    const Mark m = mark_of(t);
    if (options.verify || y_final != nullptr) {
      coupled_step(x, view, y, m, u_of(t), policy, options.verify);
    } else {
      step_generic(x, view, m, u_of(t), policy);
    }
  }
  if (y_final != nullptr) *y_final = y;
  s.state = x.vector();
  s.sorted = false;
  return s;
}

}  // namespace

Sample sample_ar(const NetworkParams& params, const PolicyDescriptor& policy, DrawSeed seed,
                 const SamplerOptions& options) {
  check_options(options);
  if (options.max_trials < 1) throw ConfigError("acceptance-rejection needs max_trials >= 1");
  policy.validate(params.servers());
  const std::uint64_t key = seed.key();
  Sample s = make_sample(Algorithm::kAcceptReject, seed);

  // Length of the stationary excursion: first return to 0 after time 0.
  CounterStream back(key, StreamDomain::kBackward, 0);
  SortedLengths y = stationary_sorted(params, back);
  std::uint64_t len = 0;
  do {
    step_sorted_ur(y, draw_mark(params, back));
    if (++len > options.max_depth) throw DepthExceeded(options.max_depth);
  } while (!all_zero(y));

  // UR cycles from 0 truncated at len; accept the first that survives.
  std::uint64_t accepted = 0;
  for (std::uint64_t k = 1; k <= options.max_trials && accepted == 0; ++k) {
    CounterStream cycle(key, StreamDomain::kCycle, k);
    SortedLengths z(params.servers(), 0);
    std::uint64_t n = 1;
    for (; n <= len; ++n) {
      step_sorted_ur(z, draw_mark(params, cycle));
      if (n < len && all_zero(z)) break;
    }
    if (n > len) accepted = k;
  }
  if (accepted == 0) throw TrialsExceeded(options.max_trials);

  CounterStream cycle(key, StreamDomain::kCycle, accepted);
  s.depth = len;
  s.rounds = accepted;
  SortedLengths y_end;
  s = replay_from_empty(
      params, policy, 1, static_cast<std::int64_t>(len),
      [&](std::int64_t) { return draw_mark(params, cycle); },
      [&](std::int64_t t) { return StepRandomness::for_time(key, t); }, options, std::move(s),
      key, &y_end);
  if (!preorder_leq(s.state, y_end)) {
    throw InvariantViolation("acceptance-rejection output not dominated by its cycle");
  }
  return s;
}

Sample sample_domcftp_empty(const NetworkParams& params, const PolicyDescriptor& policy,
                            DrawSeed seed, const SamplerOptions& options) {
  check_options(options);
  policy.validate(params.servers());
  const std::uint64_t key = seed.key();
  Sample s = make_sample(Algorithm::kDomCftpEmpty, seed);

  CounterStream back(key, StreamDomain::kBackward, 0);
  SortedLengths y0 = stationary_sorted(params, back);
  const BackwardSegment seg = simulate_backward_until(
      params, y0, [](std::int64_t, const SortedLengths& y) { return all_zero(y); }, back,
      options.max_depth);

  const auto depth = static_cast<std::int64_t>(seg.depth());
  s.depth = seg.depth();
  s.rounds = 0;
  s = replay_from_empty(
      params, policy, -depth + 1, 0, [&](std::int64_t t) { return seg.mark_at(t); },
      [&](std::int64_t t) { return StepRandomness::for_time(key, t); }, options, std::move(s),
      key, nullptr);
  if (!preorder_leq(s.state, y0)) {
    throw InvariantViolation("output " + to_string(s.state) + " not dominated by " +
                             to_string(y0));
  }
  return s;
}

Sample sample_domcftp_sandwich(const NetworkParams& params, const PolicyDescriptor& policy,
                               DrawSeed seed, const SamplerOptions& options) {
  check_options(options);
  policy.validate(params.servers());
  const SandwichMode mode = sandwich_mode(policy);
  const BackoffStrategy backoff =
      options.backoff.m1 == 0 ? BackoffStrategy::for_params(params) : options.backoff;
  const std::uint64_t key = seed.key();
  Sample s = make_sample(Algorithm::kDomCftpSandwich, seed);

  CounterStream back(key, StreamDomain::kBackward, 0);
  BackwardSegment seg(stationary_sorted(params, back));
  if (all_zero(seg.newest())) {
    finish_sorted(s, seg.newest(), options, key);
    return s;
  }

  const auto advance_lower = [&](SortedLengths& lo, Mark m, StepRandomness u) {
    if (mode == SandwichMode::kConservative) {
      step_universal_lower(lo, m);
    } else {
      step_sorted(lo, m, u, policy);
    }
  };
  const auto advance_upper = [&](SortedLengths& hi, Mark m, StepRandomness u) {
    if (mode == SandwichMode::kMonotone ||
        (mode == SandwichMode::kClassMonotone && in_steal_class(hi))) {
      step_sorted(hi, m, u, policy);
    } else {
      step_sorted_ur(hi, m);
    }
  };

  for (std::uint64_t round = 1;; ++round) {
    const std::uint64_t m = std::min(backoff.depth_for_round(round), options.max_depth);
    while (seg.depth() < m) seg.extend(params, back);

    const std::uint32_t u_round = options.redraw_u ? static_cast<std::uint32_t>(round) : 0;
    SortedLengths lower(params.servers(), 0);
    SortedLengths upper = seg.deepest();
    SortedLengths dom = upper;
    bool coalesced = all_zero(upper);
    const auto start = -static_cast<std::int64_t>(m);
    for (std::int64_t t = start + 1; t <= 0; ++t) {
      const Mark mark = seg.mark_at(t);
      const StepRandomness u = StepRandomness::for_time(key, t, u_round);
      if (coalesced) {
        step_sorted(upper, mark, u, policy);
      } else {
        advance_lower(lower, mark, u);
        advance_upper(upper, mark, u);
        coalesced = lower == upper;
      }
      if (options.verify) {
        step_sorted_ur(dom, mark);
        if (!coalesced && !preorder_leq_sorted(lower, upper)) {
          throw InvariantViolation("lower " + to_string(lower) + " above upper " +
                                   to_string(upper) + " at time " + std::to_string(t));
        }
        if (!preorder_leq_sorted(upper, dom)) {
          throw InvariantViolation("upper " + to_string(upper) + " above dominating " +
                                   to_string(dom) + " at time " + std::to_string(t));
        }
        if (!coalesced && all_zero(dom)) {
          throw InvariantViolation("dominating chain empty without coalescence at time " +
                                   std::to_string(t));
        }
      }
      if (options.on_sandwich_step) {
        options.on_sandwich_step(
            SandwichStep{round, t, u.seed, coalesced ? upper : lower, upper, coalesced});
      }
    }
    if (coalesced) {
      s.depth = m;
      s.rounds = round;
      finish_sorted(s, std::move(upper), options, key);
      return s;
    }
    if (seg.first_empty_depth() <= m) {
      throw InvariantViolation("no coalescence although the dominating chain emptied at depth " +
                               std::to_string(seg.first_empty_depth()));
    }
    if (m >= options.max_depth) throw DepthExceeded(options.max_depth);
  }
}

Sample sample_one(const NetworkParams& params, const PolicyDescriptor& policy,
                  Algorithm algorithm, DrawSeed seed, const SamplerOptions& options) {
  switch (algorithm) {
    case Algorithm::kAcceptReject: return sample_ar(params, policy, seed, options);
    case Algorithm::kDomCftpEmpty: return sample_domcftp_empty(params, policy, seed, options);
    case Algorithm::kDomCftpSandwich:
      return sample_domcftp_sandwich(params, policy, seed, options);
  }
  throw ConfigError("unknown algorithm");
}

std::vector<Sample> sample_many(const SamplerConfig& config, std::uint64_t n, std::size_t workers) {
  if (n < 1) throw ConfigError("sample_many needs n >= 1");
  if (workers < 1) throw ConfigError("sample_many needs workers >= 1");
  check_options(config.options);
  config.policy.validate(config.params.servers());
  if (config.algorithm == Algorithm::kDomCftpSandwich) sandwich_mode(config.policy);
  if (config.algorithm == Algorithm::kAcceptReject && config.options.max_trials < 1) {
    throw ConfigError("acceptance-rejection needs max_trials >= 1");
  }

  std::vector<Sample> out(n);
  std::vector<DrawError> errors;
  std::mutex errors_mutex;
  std::atomic<std::uint64_t> next{0};

  const auto draw = [&](std::uint64_t i) {
    for (std::uint32_t attempt = 0;; ++attempt) {
      try {
        out[i] = sample_one(config.params, config.policy, config.algorithm,
                            DrawSeed{config.seed, i, attempt}, config.options);
        return;
      } catch (const TrialsExceeded& e) {
        if (attempt >= config.max_retries) throw;
      }
    }
  };
  const auto work = [&] {
    for (std::uint64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        draw(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(errors_mutex);
        errors.push_back({i, e.what()});
      }
    }
  };

  const std::size_t threads = static_cast<std::size_t>(std::min<std::uint64_t>(workers, n));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end(),
              [](const DrawError& a, const DrawError& b) { return a.draw_index < b.draw_index; });
    throw BatchError(std::move(errors));
  }
  return out;
}

}  // namespace lbexact
