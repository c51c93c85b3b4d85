#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fbk/dividends.hpp"
#include "fbk/grid.hpp"
#include "fbk/jumps.hpp"
#include "fbk/linalg.hpp"
#include "fbk/model.hpp"
#include "fbk/operators.hpp"

namespace fbk {

// The fractional-step schemes are written once against this interface; the
// production grid backend and the dense toy backend both implement it.
// `prev` selects the operator frozen at the left time label of the step.
class SchemeBackend {
  public:
    enum class Part { Mixed, Spot, Variance, Full };

    virtual ~SchemeBackend() = default;
    virtual std::size_t size() const = 0;
    virtual void apply(Part part, bool prev, bool transposed, std::span<const double> x,
                       std::span<double> y) const = 0;
    // In-place solve with I - coef * F_part, F frozen at the right label.
    virtual void solve(Part part, bool transposed, double coef, std::span<double> b) const = 0;
    virtual DenseMatrix dense(Part part, bool prev) const = 0;
};

// Backend over assembled grid operators. Tridiagonal factorizations per line
// and the banded full-operator factorization are cached per solve coefficient.
class GridSchemeBackend : public SchemeBackend {
  public:
    // The referenced operator sets must outlive the backend.
    GridSchemeBackend(const OperatorSet& prev, const OperatorSet& now);
    ~GridSchemeBackend() override;

    std::size_t size() const override;
    void apply(Part part, bool prev, bool transposed, std::span<const double> x,
               std::span<double> y) const override;
    void solve(Part part, bool transposed, double coef, std::span<double> b) const override;
    DenseMatrix dense(Part part, bool prev) const override;

  private:
    struct Cache;
    const OperatorSet& prev_;
    const OperatorSet& now_;
    std::unique_ptr<Cache> cache_;
};

// Dense operator triple for handpicked toy systems and periodic probes.
struct DenseOperatorTriple {
    DenseMatrix f0, f1, f2;
    DenseMatrix full() const { return f0 + f1 + f2; }
};

class DenseSchemeBackend : public SchemeBackend {
  public:
    DenseSchemeBackend(DenseOperatorTriple prev, DenseOperatorTriple now);
    explicit DenseSchemeBackend(DenseOperatorTriple ops);
    ~DenseSchemeBackend() override;

    std::size_t size() const override;
    void apply(Part part, bool prev, bool transposed, std::span<const double> x,
               std::span<double> y) const override;
    void solve(Part part, bool transposed, double coef, std::span<double> b) const override;
    DenseMatrix dense(Part part, bool prev) const override;

  private:
    struct Cache;
    DenseOperatorTriple prev_, now_;
    std::unique_ptr<Cache> cache_;
};

// One time step of each scheme, in place. Forward steps execute the exact
// elementwise transpose of their backward counterparts.
void hv_step(const SchemeBackend& b, double theta, double dt, Direction dir,
             std::vector<double>& field);
void mcs_step(const SchemeBackend& b, double theta, double dt, Direction dir,
              std::vector<double>& field);
void implicit_euler(const SchemeBackend& b, double dt, Direction dir, std::vector<double>& field);
void scheme_step(const SchemeBackend& b, SchemeKind kind, double theta, double dt, Direction dir,
                 std::vector<double>& field);

// Forward step in its raw rearrangement whose third stage carries a
// small-norm right-hand side; kept for the round-off comparison tests.
void hv_forward_step_direct(const SchemeBackend& b, double theta, double dt,
                            std::vector<double>& field);

// Field-level wrappers over assembled operator sets.
Field hv_backward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                       double dt, const Field& v);
Field hv_forward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                      double dt, const Field& p);
Field mcs_backward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                        double dt, const Field& v);
Field mcs_forward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                       double dt, const Field& p);
Field implicit_euler_step(const OperatorSet& ops, double dt, const Field& v, Direction dir);

struct TransitionMatrix {
    DenseMatrix r;
    Direction direction = Direction::Backward;
};

enum class TransitionBuild { ClosedForm, Probe };

// Dense one-step map of the scheme, either composed in closed form from the
// operator matrices or probed column-by-column with unit vectors. Guarded to
// oracle sizes.
TransitionMatrix assemble_transition_matrix(SchemeKind kind, double theta, const SchemeBackend& b,
                                            double dt, Direction dir, TransitionBuild build);

// Scalar amplification factors of the schemes for commuting (Fourier-mode)
// operator symbols z_j = dt * lambda_j.
std::complex<double> hv_amplification(std::complex<double> z0, std::complex<double> z1,
                                      std::complex<double> z2, double theta);
std::complex<double> mcs_amplification(std::complex<double> z0, std::complex<double> z1,
                                       std::complex<double> z2, double theta);

struct InductionSettings {
    SchemeConfig scheme;
    Direction direction = Direction::Backward;
    BoundaryPolicy policy = BoundaryPolicy::PayoffClosure;
    std::optional<JumpSpec> jumps;
    DividendSchedule dividends;
    DividendMode dividend_mode = DividendMode::Transpose;
};

struct InductionReport {
    double min_field_value = 0.0;        // smallest field entry seen after any step
    bool positivity_constraint_ok = true;  // mixed-stencil grid-step flag
};

// Full time induction: damped implicit-Euler steps at both ends, the
// configured ADI scheme elsewhere, jump stages in a Strang composition and
// dividend adjustments at their snapped event steps. Backward runs take an
// OptionValue field, forward runs a Density field and return one.
Field run_induction(const InductionSettings& settings, const ModelParams& model, const Grid2D& grid,
                    const Field& initial, InductionReport* report = nullptr);

}  // namespace fbk
