#pragma once

#include <memory>
#include <string>
#include <vector>

namespace kslab {

struct PotentialDerivatives {
  double value;
  double first;
  double second;
};

// Even double-well potential with minima at x = +-1, H(+-1) = 0, and the
// barrier normalized to H(0) = 1.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual PotentialDerivatives eval(double x) const = 0;
  virtual const std::string& name() const = 0;

  double barrier_height() const { return eval(0.0).value; }
  static constexpr double well_location = 1.0;
};

// H(x) = (x^2 - 1)^2
class QuarticPotential final : public Potential {
 public:
  PotentialDerivatives eval(double x) const override;
  const std::string& name() const override;
};

// H(x) = a (x^2-1)^2 + b (x^2-1)^3 with a - b = 1 so H(0) stays 1.
// The shape parameter b must lie in [0, 2) to keep the double-well form.
class SixthOrderPotential final : public Potential {
 public:
  explicit SixthOrderPotential(double b = 0.5);
  PotentialDerivatives eval(double x) const override;
  const std::string& name() const override;
  double shape() const { return b_; }

 private:
  double b_;
  std::string name_;
};

std::shared_ptr<const Potential> make_potential(const std::string& name,
                                                double shape = 0.5);

PotentialDerivatives eval_potential(const Potential& p, double x);

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  bool advisory = false;
  double worst = 0.0;  // largest violation found (0 when clean)
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool core_pass() const;
  bool advisory_pass() const;
};

// Samples sample_count points on [-4,4] plus the exact points {0,+-1,+-2} and
// audits evenness, nonnegativity, the well/barrier values, the sign of x H'(x)
// away from {0,+-1}, and the curvature signs.  H(+-2) = 1 is advisory only.
AssumptionReport check_assumptions(const Potential& p, int sample_count = 201,
                                   double tol = 1e-9);

// Max discrepancy between analytic H', H'' and central differences of step h.
double derivative_consistency(const Potential& p,
                              const std::vector<double>& points, double h);

}  // namespace kslab
