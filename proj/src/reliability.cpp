#include "rcsim/reliability.hpp"

#include <cmath>
#include <ostream>
#include <utility>

#include "rcsim/errors.hpp"

namespace rcsim {

CtTable::CtTable(std::vector<CtBucket> buckets, double retention_months)
    : buckets_(std::move(buckets)), retention_months_(retention_months) {
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
        if (buckets_[i].pe_lo > buckets_[i].pe_hi)
            throw ConfigError("ct table bucket " + std::to_string(i) + " has pe_lo > pe_hi");
        if (i > 0 && buckets_[i].pe_lo != buckets_[i - 1].pe_hi + 1)
            throw ConfigError("ct table buckets must be contiguous");
    }
}

CtTable CtTable::standard() {
    return CtTable({{0, 1000, 4}, {1001, 2000, 3}, {2001, 3000, 2}}, 12.0);
}

std::uint32_t CtTable::lookup(std::uint32_t pe) const {
    for (const auto& b : buckets_)
        if (pe <= b.pe_hi) return b.threshold;
    return 0;
}

std::uint32_t CtTable::max_threshold() const {
    std::uint32_t m = 0;
    for (const auto& b : buckets_) m = std::max(m, b.threshold);
    return m;
}

void CtTable::write_csv(std::ostream& out) const {
    out << "pe_lo,pe_hi,threshold\n";
    for (const auto& b : buckets_) out << b.pe_lo << ',' << b.pe_hi << ',' << b.threshold << '\n';
}

double ErrorModel::base_ber(std::uint32_t pe, double months) const {
    return base_intercept + base_per_kcycle * (pe / 1000.0) + base_per_month * months;
}

double ErrorModel::delta_per_copyback(std::uint32_t pe) const {
    for (std::size_t i = 0; i < bucket_upper.size(); ++i)
        if (pe <= bucket_upper[i]) return bucket_delta[i];
    return delta_beyond;
}

void ErrorModel::validate() const {
    if (bucket_upper.size() != bucket_delta.size())
        throw ConfigError("error model: bucket_upper and bucket_delta differ in length");
    for (std::size_t i = 1; i < bucket_upper.size(); ++i) {
        if (bucket_upper[i] <= bucket_upper[i - 1])
            throw ConfigError("error model: bucket bounds must increase");
        if (bucket_delta[i] < bucket_delta[i - 1])
            throw ConfigError("error model: delta must be nondecreasing in P/E cycles");
    }
    if (!bucket_delta.empty() && delta_beyond < bucket_delta.back())
        throw ConfigError("error model: delta_beyond below the last bucket delta");
    if (base_per_kcycle < 0 || base_per_month < 0)
        throw ConfigError("error model: base error must be nondecreasing");
    if (ecc_capacity <= 0) throw ConfigError("error model: ecc_capacity must be > 0");
}

CtTable derive_ct_from_model(const ErrorModel& m, double retention_months, std::uint32_t cap) {
    m.validate();
    std::vector<CtBucket> buckets;
    std::uint32_t lo = 0;
    for (std::size_t i = 0; i < m.bucket_upper.size(); ++i) {
        const std::uint32_t hi = m.bucket_upper[i];
        const double base = m.base_ber(hi, retention_months);
        const double delta = m.delta_per_copyback(hi);
        std::uint32_t n = 0;
        if (base > m.ecc_capacity) {
            n = 0;
        } else if (delta <= 0.0) {
            n = cap;
        } else {
            while (n < cap && base + (n + 1) * delta <= m.ecc_capacity) ++n;
        }
        buckets.push_back({lo, hi, n});
        lo = hi + 1;
    }
    return CtTable(std::move(buckets), retention_months);
}

Reliability::Reliability(ErrorModel model, double retention_months, std::uint32_t threshold_cap)
    : model_(std::move(model)),
      retention_(retention_months),
      table_(derive_ct_from_model(model_, retention_months, threshold_cap)) {
    if (retention_months < 0) throw ConfigError("reliability.retention_months must be >= 0");
}

PageReliabilityState Reliability::fresh(std::uint32_t pe) const {
    return {0, model_.base_ber(pe, retention_)};
}

PageReliabilityState Reliability::apply_copyback(PageReliabilityState s, std::uint32_t pe) const {
    ++s.copyback_hops_since_ecc;
    s.accumulated_error =
        model_.base_ber(pe, retention_) + s.copyback_hops_since_ecc * model_.delta_per_copyback(pe);
    return s;
}

PageReliabilityState Reliability::apply_ecc_pass(PageReliabilityState s, std::uint32_t dst_pe) const {
    if (!is_readable(s))
        throw DataLossFault("ECC pass on an unreadable page (hops=" +
                            std::to_string(s.copyback_hops_since_ecc) +
                            ", error=" + std::to_string(s.accumulated_error) + ")");
    return fresh(dst_pe);
}

bool Reliability::is_readable(const PageReliabilityState& s) const {
    return s.accumulated_error <= model_.ecc_capacity;
}

bool Reliability::readable_after(std::uint32_t hops, std::uint32_t pe) const {
    return model_.base_ber(pe, retention_) + hops * model_.delta_per_copyback(pe) <=
           model_.ecc_capacity;
}

}  // namespace rcsim
