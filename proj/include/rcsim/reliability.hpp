#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rcsim {

/// One P/E-cycle range of the copyback threshold table.
struct CtBucket {
    std::uint32_t pe_lo = 0;
    std::uint32_t pe_hi = 0;
    std::uint32_t threshold = 0;  ///< max consecutive copybacks before an ECC pass

    bool operator==(const CtBucket&) const = default;
};

/// CT(pe, retention): maximum number of consecutive copybacks a page written
/// to a block with `pe` P/E cycles may take while still meeting the
/// retention requirement. Cycles beyond the last bucket forbid copyback.
class CtTable {
public:
    CtTable() = default;
    CtTable(std::vector<CtBucket> buckets, double retention_months);

    /// 12-month table of the characterized MLC part: 1-1000 -> 4,
    /// 1001-2000 -> 3, 2001-3000 -> 2.
    static CtTable standard();

    std::uint32_t lookup(std::uint32_t pe) const;
    std::uint32_t max_threshold() const;

    const std::vector<CtBucket>& buckets() const { return buckets_; }
    double retention_months() const { return retention_months_; }

    /// `pe_lo,pe_hi,threshold`
    void write_csv(std::ostream& out) const;

    bool operator==(const CtTable&) const = default;

private:
    std::vector<CtBucket> buckets_;
    double retention_months_ = 12.0;
};

inline std::uint32_t ct_lookup(const CtTable& table, std::uint32_t pe) { return table.lookup(pe); }

/// Normalized error accumulation model. Error levels are expressed as a
/// fraction of the ECC correction capacity (1.0). The retention error grows
/// linearly with wear and retention time; every consecutive copyback adds a
/// per-bucket increment.
///
/// The default coefficients are calibrated so that, at 12 months, the
/// largest hop count that stays within capacity in each bucket equals the
/// standard CtTable entry, for every P/E value in the bucket.
struct ErrorModel {
    std::vector<std::uint32_t> bucket_upper{1000, 2000, 3000};
    std::vector<double> bucket_delta{0.19, 0.24, 0.33};
    double delta_beyond = 0.5;  ///< increment past the last bucket
    double base_intercept = 0.02;
    double base_per_kcycle = 0.03;
    double base_per_month = 0.01;
    double ecc_capacity = 1.0;

    static ErrorModel calibrated() { return {}; }

    /// Retention error of a freshly corrected page, N(pe, months) normalized.
    double base_ber(std::uint32_t pe, double months) const;
    double delta_per_copyback(std::uint32_t pe) const;

    /// Throws ConfigError unless both functions are nondecreasing and the
    /// bucket lists line up.
    void validate() const;
};

struct PageReliabilityState {
    std::uint32_t copyback_hops_since_ecc = 0;
    double accumulated_error = 0.0;
};

/// Error model bound to a retention requirement, with its derived CtTable.
class Reliability {
public:
    explicit Reliability(ErrorModel model = ErrorModel::calibrated(), double retention_months = 12.0,
                         std::uint32_t threshold_cap = 7);

    const ErrorModel& model() const { return model_; }
    const CtTable& table() const { return table_; }
    double retention_months() const { return retention_; }

    std::uint32_t ct_lookup(std::uint32_t pe) const { return table_.lookup(pe); }

    PageReliabilityState fresh(std::uint32_t pe) const;
    PageReliabilityState apply_copyback(PageReliabilityState s, std::uint32_t pe) const;
    /// Throws DataLossFault if `s` is already unreadable.
    PageReliabilityState apply_ecc_pass(PageReliabilityState s, std::uint32_t dst_pe) const;
    bool is_readable(const PageReliabilityState& s) const;

    /// Same check without materializing a state: base + hops * delta <= capacity.
    bool readable_after(std::uint32_t hops, std::uint32_t pe) const;

private:
    ErrorModel model_;
    double retention_;
    CtTable table_;
};

/// Threshold per bucket = max n with base_ber(pe_hi) + n * delta(pe_hi) <= capacity,
/// capped at `cap` (reached only when delta is zero or tiny).
CtTable derive_ct_from_model(const ErrorModel& m, double retention_months, std::uint32_t cap = 7);

}  // namespace rcsim
