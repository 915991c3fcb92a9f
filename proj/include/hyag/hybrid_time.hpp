#ifndef HYAG_HYBRID_TIME_HPP
#define HYAG_HYBRID_TIME_HPP

#include <optional>
#include <string>
#include <vector>

namespace hyag {

// Ordered interval/jump structure. Interval j is [t_j, t_{j+1}] x {j} with
// t_0 = 0 and the last interval ending at `end`.
class HybridTimeDomain {
public:
    HybridTimeDomain() = default;
    HybridTimeDomain(std::vector<double> jump_times, double end, bool final_open);

    const std::vector<double>& jump_times() const { return jumps_; }
    double end() const { return end_; }
    bool final_open() const { return final_open_; }

    int num_intervals() const { return static_cast<int>(jumps_.size()) + 1; }
    double start_of(int j) const { return j == 0 ? 0.0 : jumps_[j - 1]; }
    double end_of(int j) const { return j < static_cast<int>(jumps_.size()) ? jumps_[j] : end_; }
    bool contains(double t, int j) const;

    double sup_t() const { return end_; }
    int sup_j() const { return static_cast<int>(jumps_.size()); }
    double length() const { return end_ + static_cast<double>(jumps_.size()); }

    bool operator==(const HybridTimeDomain&) const = default;

private:
    std::vector<double> jumps_;
    double end_ = 0.0;
    bool final_open_ = false;
};

struct SupLength {
    double sup_t;
    int sup_j;
    double length;
};

// `times` lists t_0 = 0, t_1, ..., and without a horizon its last entry closes
// the final interval. With a horizon every entry after t_0 is a jump and the
// last interval is open up to the horizon.
HybridTimeDomain make_domain(const std::vector<double>& times, std::optional<double> horizon = std::nullopt);
SupLength sup_and_length(const HybridTimeDomain& e);
HybridTimeDomain truncate(const HybridTimeDomain& e, double t, int j);
HybridTimeDomain shared_domain(const HybridTimeDomain& a, const HybridTimeDomain& b, bool align_coincident_jumps = false);
std::string render_domain(const HybridTimeDomain& e);

}  // namespace hyag

#endif
