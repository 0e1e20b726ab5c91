// Transports a tangent vector around the circle loop on S^6 and compares
// the result with the unitary agreement condition, then prints the special
// subspace generated by a complex line under U(3).
#include "holoforge/special.hpp"
#include "holoforge/weakcheck.hpp"

#include <cstdio>

using namespace holoforge;

int main() {
  const double r = 0.6;
  const auto rep = example1_check(r);
  std::printf("r = %.2f  X_0[1] = %.7f  X_2pi[1] = %.7f  gap = %.7f  (%s)\n", r, rep.start(1), rep.end(1),
              rep.gap_numeric, rep.verdict().c_str());

  const GroupSpec u3(Family::U, 3);
  const auto pack = build_structures(u3);
  Vector x = Vector::Unit(6, 0);
  Matrix p(6, 1);
  p.col(0) = x;
  const auto special = def2_special(pack, algebra_basis(pack), SubspaceBasis::from_orthonormal(p));
  std::printf("%s, setwise stabilizer of a line has dim %ld; summands:", u3.name().c_str(),
              static_cast<long>(special.stabilizer_dim));
  for (const auto& c : special.candidates) std::printf(" %ld", static_cast<long>(c.complement.dim()));
  std::printf("\n");
}
