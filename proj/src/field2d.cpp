#include "efk/field2d.hpp"

#include "efk/errors.hpp"

namespace efk {

OperatorVariant variant_from_name(const std::string& name) {
  if (name == "biharmonic") return OperatorVariant::kBiharmonic;
  if (name == "split-quartic") return OperatorVariant::kSplitQuartic;
  if (name == "generalized") return OperatorVariant::kGeneralized;
  throw ConfigError("unknown operator variant: " + name);
}

const char* variant_name(OperatorVariant v) {
  switch (v) {
    case OperatorVariant::kBiharmonic: return "biharmonic";
    case OperatorVariant::kSplitQuartic: return "split-quartic";
    case OperatorVariant::kGeneralized: return "generalized";
  }
  return "?";
}

OperatorCoeffs OperatorCoeffs::for_variant(OperatorVariant v, double beta) {
  OperatorCoeffs c;
  c.b1 = beta;
  c.b2 = beta;
  if (v == OperatorVariant::kSplitQuartic) c.a12 = 0.0;
  return c;
}

Profile1D Field2D::slice(Index i) const {
  Profile1D p;
  p.grid = grid.x_grid();
  p.potential = potential;
  p.beta = beta;
  p.values.resize(nx(), m());
  for (Index c = 0; c < m(); ++c) p.values.col(c) = comps[c].row(i).transpose();
  return p;
}

Field2D make_field(const Grid2D& grid, PotentialPtr pot, double beta,
                   OperatorVariant variant) {
  if (!pot) throw InvalidParameter("make_field: null potential");
  Field2D f;
  f.grid = grid;
  f.potential = std::move(pot);
  f.beta = beta;
  f.variant = variant;
  f.coeffs = OperatorCoeffs::for_variant(variant, beta);
  f.comps.assign(f.potential->dim(), MatX::Zero(grid.nt, grid.nx));
  return f;
}

}  // namespace efk
