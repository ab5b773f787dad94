#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dgtrace/slicer.hpp"

namespace dgtrace::synth {

struct SynthOptions {
  int min_modules = 5, max_modules = 7;
  int min_subroutines = 2, max_subroutines = 3;  // per module
  int min_locals = 7, max_locals = 11;           // per subroutine
  double import_probability = 0.5;               // per earlier module
  double helper_call_probability = 0.12;         // per local definition
};

struct SourceFile {
  std::string name;
  std::string text;
};

// Deterministic generator: draws are taken from mt19937_64 by modulo so that
// corpora depend only on the seed, not on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : e_(seed) {}
  int below(int n) { return static_cast<int>(e_() % static_cast<std::uint64_t>(n)); }
  int between(int lo, int hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(e_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 e_;
};

namespace detail {

struct ModulePlan {
  std::string name;
  std::vector<std::string> globals;     // module-level variables
  std::vector<std::string> imports;     // globals of earlier modules visible here
  std::vector<std::string> helpers;     // callable functions visible here (own + imported)
};

inline const char* random_op(Rng& rng) {
  static const char* ops[] = {" + ", " - ", " * "};
  return ops[rng.below(3)];
}

}  // namespace detail

// A modular MiniFort code base: each module owns a few module variables, a
// two-argument helper function and several subroutines. Every subroutine
// builds a small chain of locals from its inputs and writes state%omega plus
// one module variable. Modules import variables and helpers from earlier
// modules, which couples the per-subroutine cones sparsely.
inline std::vector<SourceFile> generate_corpus(std::uint64_t seed, const SynthOptions& opt = {}) {
  Rng rng(seed);
  const int n_modules = rng.between(opt.min_modules, opt.max_modules);
  std::vector<detail::ModulePlan> plans(static_cast<std::size_t>(n_modules));
  for (int k = 0; k < n_modules; ++k) {
    auto& p = plans[static_cast<std::size_t>(k)];
    p.name = "mod" + std::to_string(k);
    for (int i = 1; i <= 2; ++i) p.globals.push_back("g" + std::to_string(k) + "_" + std::to_string(i));
    p.helpers.push_back("f" + std::to_string(k));
  }

  std::vector<SourceFile> files;
  for (int k = 0; k < n_modules; ++k) {
    auto& p = plans[static_cast<std::size_t>(k)];
    std::ostringstream os;
    os << "module " << p.name << "\n";
    for (int j = 0; j < k; ++j) {
      if (!rng.chance(opt.import_probability)) continue;
      const auto& q = plans[static_cast<std::size_t>(j)];
      const std::string& g = q.globals[static_cast<std::size_t>(rng.below(2))];
      os << "  use " << q.name << ", only: " << g << ", " << q.helpers[0] << "\n";
      p.imports.push_back(g);
      p.helpers.push_back(q.helpers[0]);
    }
    os << "  implicit none\n";
    os << "  real :: " << p.globals[0] << ", " << p.globals[1] << "\n";
    os << "contains\n\n";

    const std::string& fname = p.helpers[0];
    os << "  function " << fname << "(a, b) result(r)\n"
       << "    real, intent(in) :: a, b\n"
       << "    real :: r, t\n"
       << "    t = a" << detail::random_op(rng) << "b\n"
       << "    r = t * 0.5 + b\n"
       << "  end function " << fname << "\n\n";

    const int n_subs = rng.between(opt.min_subroutines, opt.max_subroutines);
    for (int s = 0; s < n_subs; ++s) {
      const std::string sname = "s" + std::to_string(k) + "_" + std::to_string(s);
      const int n_locals = rng.between(opt.min_locals, opt.max_locals);
      std::vector<std::string> inputs = {"state%t" + std::to_string(s), "state%q" + std::to_string(s)};
      for (const auto& g : p.globals) inputs.push_back(g);
      for (const auto& g : p.imports) inputs.push_back(g);
      std::vector<std::string> locals;
      for (int i = 1; i <= n_locals; ++i) locals.push_back("v" + std::to_string(i));

      os << "  subroutine " << sname << "(state)\n"
         << "    type(model_state), intent(inout) :: state\n"
         << "    real :: ";
      for (std::size_t i = 0; i < locals.size(); ++i) os << (i ? ", " : "") << locals[i];
      os << "\n";

      auto operand = [&](int i) -> std::string {
        // Prefer recent locals so each subroutine forms a chain with side inputs.
        if (i > 0 && rng.chance(0.7)) return locals[static_cast<std::size_t>(std::max(0, i - 1 - rng.below(3)))];
        return inputs[static_cast<std::size_t>(rng.below(static_cast<int>(inputs.size())))];
      };
      for (int i = 0; i < n_locals; ++i) {
        os << "    " << locals[static_cast<std::size_t>(i)] << " = ";
        if (rng.chance(opt.helper_call_probability)) {
          const auto& h = p.helpers[static_cast<std::size_t>(rng.below(static_cast<int>(p.helpers.size())))];
          os << h << "(" << operand(i) << ", " << operand(i) << ")";
        } else if (rng.chance(0.1)) {
          os << "max(" << operand(i) << ", 0.0)";
        } else {
          os << operand(i);
          int extra = rng.below(2);
          for (int e = 0; e < extra; ++e) os << detail::random_op(rng) << operand(i);
          if (extra == 0) os << " * 1.5";
        }
        os << "\n";
      }
      const auto& last = locals.back();
      const auto& mid = locals[static_cast<std::size_t>(n_locals / 2)];
      os << "    state%omega = " << last << " + " << locals[static_cast<std::size_t>(n_locals - 2)] << "\n";
      os << "    " << p.globals[static_cast<std::size_t>(s % 2)] << " = " << mid << " * 0.9\n";
      os << "  end subroutine " << sname << "\n\n";
    }
    os << "end module " << p.name << "\n";
    files.push_back({p.name + ".mf90", os.str()});
  }
  return files;
}

// A uniformly chosen node of the slice, drawn from a stream derived from the
// seed.
inline std::string pick_bug(const Slice& slice, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::string> names(slice.graph.names().begin(), slice.graph.names().end());
  std::sort(names.begin(), names.end());
  return names.at(static_cast<std::size_t>(rng.below(static_cast<int>(names.size()))));
}

}  // namespace dgtrace::synth
