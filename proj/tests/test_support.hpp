#ifndef EFK_TEST_SUPPORT_HPP
#define EFK_TEST_SUPPORT_HPP

#include "efk/action1d.hpp"
#include "efk/families.hpp"
#include "efk/minimize1d.hpp"

namespace efk_test {

// Shared solves, computed once per test binary.

inline const efk::MinimalHeteroclinic& ac_minimizer() {
  static const efk::MinimalHeteroclinic sol = [] {
    auto pot = efk::allen_cahn();
    const efk::Grid1D grid = efk::Grid1D::make(15.0, 301);
    const efk::Profile1D init = efk::build_e0(pot, grid, 3.0);
    return efk::minimize_heteroclinic(pot, 3.0, init, efk::SolverOptions{});
  }();
  return sol;
}

// Deep-tail instance (tails below 1e-10) for translation-invariance checks.
inline const efk::MinimalHeteroclinic& ac_minimizer_deep() {
  static const efk::MinimalHeteroclinic sol = [] {
    auto pot = efk::allen_cahn();
    const efk::Grid1D grid = efk::Grid1D::make(26.0, 1301);
    const efk::Profile1D init = efk::build_e0(pot, grid, 3.0);
    return efk::minimize_heteroclinic(pot, 3.0, init, efk::SolverOptions{});
  }();
  return sol;
}

inline const efk::FindFamiliesResult& weps_families() {
  static const efk::FindFamiliesResult fam = [] {
    efk::FamilyConfig cfg;
    cfg.n = 675;  // h = 0.06 on L = 20.25
    return efk::find_families(0.4, 1.0, cfg);
  }();
  return fam;
}

}  // namespace efk_test

#endif  // EFK_TEST_SUPPORT_HPP
