#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collapselab/errors.hpp"

namespace collapselab {

// Machine space formalism "wm-halt-v1":
//   - complete transition table over states 0..n-1 (start state 0) and
//     symbols 0..m-1 (blank = 0), one entry per (state, symbol) pair;
//   - an entry writes, moves L/R, then switches to a next state or to the
//     distinguished HALT pseudo-state (halting entries still write and move);
//   - two-sided unbounded tape, head at the origin;
//   - on halt, the output is the tape segment spanning every cell the head
//     has READ (the cell reached by the final move is not part of it).
// Entry code: c = write + m * (move + 2 * next), move 0=L / 1=R, next in
// 0..n-1 for states and n for HALT; codes pack big-endian in (state, symbol)
// row-major order, so index order is lexicographic table order.
inline constexpr const char* kFormalismVersion = "wm-halt-v1";

inline constexpr int kMoveLeft = 0;
inline constexpr int kMoveRight = 1;

struct Transition {
  std::uint8_t write = 0;
  std::uint8_t move = kMoveLeft;
  std::uint16_t next = 0;  // == n_states means HALT

  bool operator==(const Transition&) const = default;
};

struct TuringMachineSpec {
  int n_states = 1;
  int n_symbols = 2;
  std::vector<Transition> transitions;  // size n_states * n_symbols

  const Transition& entry(int state, int symbol) const {
    return transitions[static_cast<std::size_t>(state) * n_symbols + symbol];
  }

  bool operator==(const TuringMachineSpec&) const = default;
};

inline void validate_space_params(int n_states, int n_symbols) {
  if (n_states < 1) throw InvariantError("machine space: n_states must be >= 1");
  if (n_symbols < 2 || n_symbols > 10)
    throw InvariantError("machine space: n_symbols must be in [2, 10]");
}

// |M| = (2 * m * (n+1)) ^ (n * m), overflow-checked.
inline std::uint64_t machine_count(int n_states, int n_symbols) {
  validate_space_params(n_states, n_symbols);
  const std::uint64_t base =
      2ULL * static_cast<std::uint64_t>(n_symbols) *
      static_cast<std::uint64_t>(n_states + 1);
  const int exp = n_states * n_symbols;
  std::uint64_t count = 1;
  for (int i = 0; i < exp; ++i) {
    if (count > UINT64_MAX / base)
      throw InvariantError("machine_count: space size overflows 64 bits");
    count *= base;
  }
  return count;
}

inline TuringMachineSpec decode_machine(std::uint64_t index, int n_states,
                                        int n_symbols) {
  const std::uint64_t total = machine_count(n_states, n_symbols);
  if (index >= total) throw InvariantError("decode_machine: index out of range");
  const std::uint64_t base =
      2ULL * static_cast<std::uint64_t>(n_symbols) *
      static_cast<std::uint64_t>(n_states + 1);
  const int entries = n_states * n_symbols;
  TuringMachineSpec spec;
  spec.n_states = n_states;
  spec.n_symbols = n_symbols;
  spec.transitions.resize(entries);
  for (int i = entries - 1; i >= 0; --i) {
    const std::uint64_t code = index % base;
    index /= base;
    Transition& t = spec.transitions[i];
    t.write = static_cast<std::uint8_t>(code % n_symbols);
    t.move = static_cast<std::uint8_t>((code / n_symbols) % 2);
    t.next = static_cast<std::uint16_t>(code / (2 * n_symbols));
  }
  return spec;
}

inline std::uint64_t encode_machine(const TuringMachineSpec& spec) {
  validate_space_params(spec.n_states, spec.n_symbols);
  const int entries = spec.n_states * spec.n_symbols;
  if (static_cast<int>(spec.transitions.size()) != entries)
    throw InvariantError("encode_machine: incomplete transition table");
  const std::uint64_t base =
      2ULL * static_cast<std::uint64_t>(spec.n_symbols) *
      static_cast<std::uint64_t>(spec.n_states + 1);
  std::uint64_t index = 0;
  for (const Transition& t : spec.transitions) {
    if (t.write >= spec.n_symbols || t.move > 1 || t.next > spec.n_states)
      throw InvariantError("encode_machine: entry field out of range");
    const std::uint64_t code =
        t.write + static_cast<std::uint64_t>(spec.n_symbols) *
                      (t.move + 2ULL * t.next);
    index = index * base + code;
  }
  return index;
}

enum class RunStatus { halted, budget_exceeded };

struct RunOutcome {
  RunStatus status = RunStatus::budget_exceeded;
  std::string output;  // defined only when halted
  std::uint64_t steps_used = 0;
};

// Reusable workspace so census loops avoid re-allocating the tape. The tape
// spans [-budget, +budget]; a head that starts at the origin can never leave
// it within the step budget.
class TapeWorkspace {
 public:
  explicit TapeWorkspace(std::uint64_t budget)
      : budget_(budget), origin_(budget + 1),
        tape_(2 * budget + 3, 0) {}

  std::uint64_t budget() const { return budget_; }

  RunOutcome run(const TuringMachineSpec& spec) {
    const int halt_state = spec.n_states;
    const Transition* table = spec.transitions.data();
    const int m = spec.n_symbols;

    std::int64_t pos = static_cast<std::int64_t>(origin_);
    std::int64_t min_read = pos, max_read = pos;
    int state = 0;
    RunOutcome out;
    for (std::uint64_t step = 1; step <= budget_; ++step) {
      if (pos < min_read) min_read = pos;
      if (pos > max_read) max_read = pos;
      const std::uint8_t sym = tape_[pos];
      const Transition& t = table[state * m + sym];
      tape_[pos] = t.write;
      pos += (t.move == kMoveRight) ? 1 : -1;
      if (t.next == halt_state) {
        out.status = RunStatus::halted;
        out.steps_used = step;
        out.output.reserve(max_read - min_read + 1);
        for (std::int64_t i = min_read; i <= max_read; ++i)
          out.output.push_back(static_cast<char>('0' + tape_[i]));
        break;
      }
      state = t.next;
    }
    if (out.status == RunStatus::budget_exceeded) out.steps_used = budget_;
    // restore blanks over the touched span (head writes only on read cells)
    std::int64_t lo = min_read < pos ? min_read : pos;
    std::int64_t hi = max_read > pos ? max_read : pos;
    for (std::int64_t i = lo; i <= hi; ++i) tape_[i] = 0;
    return out;
  }

 private:
  std::uint64_t budget_;
  std::size_t origin_;
  std::vector<std::uint8_t> tape_;
};

inline RunOutcome run_machine(const TuringMachineSpec& spec,
                              std::uint64_t budget) {
  if (budget < 1) throw InvariantError("run_machine: budget must be >= 1");
  validate_space_params(spec.n_states, spec.n_symbols);
  TapeWorkspace workspace(budget);
  return workspace.run(spec);
}

}  // namespace collapselab
