#ifndef NILRING_WARING_HPP
#define NILRING_WARING_HPP

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "nilring/errors.hpp"
#include "nilring/fastpath.hpp"
#include "nilring/group.hpp"
#include "nilring/residue.hpp"
#include "nilring/weyl.hpp"

namespace nilring {

enum class CountStrategy { Auto, Direct, MeetInMiddle };

// Exact number of 2r-tuples in [-N, N] whose alternating product equals g.
mpz_class count_representations(const GroupElement& g, int r, long N, CountStrategy strategy,
                                const WorkBudget& budget);

// Full table value -> count over all tuples; cost (2N+1)^{2r}.
std::map<FlatKey, std::int64_t> count_table(int d, int r, long N, const WorkBudget& budget);

// Major/minor frequency split of the counting integral.
struct ArcSplitResult {
    std::complex<double> s_maj{0.0, 0.0};
    std::complex<double> s_min{0.0, 0.0};
    mpz_class exact_count = 0;
    double partition_defect = 0.0;     // |s_maj + s_min - exact|
    double kernel_check = 0.0;         // max deviation of the arc kernel vs direct quadrature
    double normalized_minor = 0.0;     // |s_min| / N^{2r - Q_hom}
    double relative_minor = 0.0;       // |s_min| / (2N+1)^{2r}
    std::size_t fraction_count = 0;
    double cutoff_radius = 0.0;        // N^delta
};

ArcSplitResult arc_split(const GroupElement& g, int r, long N, double delta,
                         const WorkBudget& budget);

// Truncated singular series, assembled along two routes.
struct SingularSeriesEstimate {
    double euler_value = 1.0;                    // product of truncated local factors
    mpq_class euler_exact = 1;
    std::complex<double> fraction_value{0.0, 0.0};  // direct sum over fractions q <= q_max
    double agreement_abs = 0.0;
    double agreement_rel = 0.0;
    long q_max = 6;
    bool obstructed = false;                     // some local factor vanished
    std::vector<std::pair<std::int64_t, int>> prime_levels;
};

SingularSeriesEstimate singular_series(const GroupElement& g, int r, long q_max,
                                       const WorkBudget& budget);

// Predicted count: normalization * singular series * phase-volume density
// at the dilated target, with the exact count attached when affordable.
struct CountReport {
    int d = 2;
    int r = 1;
    long N = 1;
    std::string g_text;
    bool have_exact = false;
    mpz_class exact_count = 0;
    double normalization = 1.0;     // N^{2r - Q_hom}
    double normalized_count = 0.0;  // exact / normalization
    SingularSeriesEstimate series;
    McResult density;               // phase-volume density at N^{-1} dilated g
    double eps = 0.1;
    double prediction = 0.0;        // normalization * series * density
    double predicted_normalized = 0.0;
    double residual = 0.0;          // normalized_count - predicted_normalized
    double relative_residual = 0.0;
};

CountReport predict_count(const GroupElement& g, int r, long N, double eps, const McParams& mc,
                          long q_max, CountStrategy strategy, const WorkBudget& budget);

// Normalized count mass of each residue class b (coordinates in [0,Q)).
struct ScanRow {
    std::vector<std::int64_t> rep;  // class representative coordinates
    double mass = 0.0;              // sum of counts / N^{2r - Q_hom}
    std::int64_t distinct_values = 0;
    std::int64_t min_count = 0;
    std::int64_t max_count = 0;
    bool parity_ok = true;          // necessary congruence mod 2 on the first block
    bool positive = false;
};

struct ScanTable {
    int d = 2;
    std::int64_t Q = 2;
    int r = 1;
    long N = 1;
    std::vector<ScanRow> rows;
    double total_mass = 0.0;
};

ScanTable residue_class_scan(int d, std::int64_t Q, int r, long N, const WorkBudget& budget);

}  // namespace nilring

#endif
