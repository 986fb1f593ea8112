#include "paucens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace paucens {

namespace testhooks {
namespace {
bool g_pessimistic_ties = true;
}
void set_pessimistic_tie_rule(bool pessimistic) { g_pessimistic_ties = pessimistic; }
bool pessimistic_tie_rule() { return g_pessimistic_ties; }
}  // namespace testhooks

namespace {

// Nearby-integer guard so grid products like 10 * 0.3 hit their exact rank.
double snap_integral(double x) {
    double nearest = std::round(x);
    return std::abs(x - nearest) <= 1e-9 ? nearest : x;
}

void check_scores(const Eigen::Ref<const Eigen::VectorXd>& pos,
                  const Eigen::Ref<const Eigen::VectorXd>& neg) {
    if (pos.size() == 0 || neg.size() == 0)
        throw std::invalid_argument("scores: both classes must be non-empty");
    if (!pos.allFinite() || !neg.allFinite())
        throw std::invalid_argument("scores: non-finite score");
}

// A positive strictly above a negative is a win; a tie is a loss unless the
// test hook flipped the rule.
bool misordered(double pos_score, double neg_score) {
    if (testhooks::pessimistic_tie_rule()) return pos_score <= neg_score;
    return pos_score < neg_score;
}

}  // namespace

PaucRange::PaucRange(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!(alpha >= 0.0) || !(alpha < beta) || !(beta <= 1.0))
        throw std::invalid_argument("pAUC range: need 0 <= alpha < beta <= 1, got [" +
                                    std::to_string(alpha) + ", " + std::to_string(beta) + "]");
}

Eigen::Index PaucRange::j_alpha(Eigen::Index n) const {
    return static_cast<Eigen::Index>(std::ceil(snap_integral(static_cast<double>(n) * alpha)));
}

Eigen::Index PaucRange::j_beta(Eigen::Index n) const {
    return static_cast<Eigen::Index>(std::floor(snap_integral(static_cast<double>(n) * beta)));
}

double PaucRange::risk_normalizer(Eigen::Index m, Eigen::Index n) const {
    return static_cast<double>(m) * static_cast<double>(n) * (beta - alpha);
}

void PaucRange::validate_for(Eigen::Index n) const {
    if (j_beta(n) - j_alpha(n) < 1)
        throw std::invalid_argument(
            "pAUC range [" + std::to_string(alpha) + ", " + std::to_string(beta) +
            "] is degenerate for n = " + std::to_string(n) +
            " (j_beta - j_alpha < 1)");
}

double auc(const Eigen::Ref<const Eigen::VectorXd>& pos_scores,
           const Eigen::Ref<const Eigen::VectorXd>& neg_scores) {
    check_scores(pos_scores, neg_scores);
    const Eigen::Index m = pos_scores.size(), n = neg_scores.size();

    std::vector<double> pos(pos_scores.begin(), pos_scores.end());
    std::vector<double> neg(neg_scores.begin(), neg_scores.end());
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    // Count misordered pairs by merging, then evaluate 1 - count/(m*n) with
    // the same expression pauc uses so the two agree bit for bit at the
    // full range.
    std::size_t count = 0, i = 0, covered = 0;
    for (double s : neg) {
        while (i < pos.size() && misordered(pos[i], s)) {
            ++covered;
            ++i;
        }
        count += covered;
    }
    const double c = static_cast<double>(m) * static_cast<double>(n);
    return 1.0 - static_cast<double>(count) / c;
}

double pauc(const Eigen::Ref<const Eigen::VectorXd>& pos_scores,
            const Eigen::Ref<const Eigen::VectorXd>& neg_scores,
            const PaucRange& range) {
    check_scores(pos_scores, neg_scores);
    const Eigen::Index m = pos_scores.size(), n = neg_scores.size();
    range.validate_for(n);
    const Eigen::Index ja = range.j_alpha(n), jb = range.j_beta(n);

    // Rank negatives by descending score, ties by ascending input index.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return neg_scores[a] > neg_scores[b];
    });

    // Misordered pairs against negatives ranked in positions ja+1..jb.
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(jb - ja));
    for (Eigen::Index r = ja; r < jb; ++r)
        window.push_back(neg_scores[order[static_cast<std::size_t>(r)]]);
    std::sort(window.begin(), window.end());

    std::vector<double> pos(pos_scores.begin(), pos_scores.end());
    std::sort(pos.begin(), pos.end());

    // Both sequences ascend, so the number of positives misordered against a
    // window score is non-decreasing: accumulate with two pointers.
    std::size_t count = 0, i = 0, covered = 0;
    for (double s : window) {
        while (i < pos.size() && misordered(pos[i], s)) {
            ++covered;
            ++i;
        }
        count += covered;
    }

    const double c = range.risk_normalizer(m, n);
    const double risk = static_cast<double>(count) / c;
    return 1.0 - risk;
}

std::vector<std::pair<double, double>> roc_points(
    const Eigen::Ref<const Eigen::VectorXd>& pos_scores,
    const Eigen::Ref<const Eigen::VectorXd>& neg_scores) {
    check_scores(pos_scores, neg_scores);
    const double m = static_cast<double>(pos_scores.size());
    const double n = static_cast<double>(neg_scores.size());

    struct Entry {
        double score;
        bool positive;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(pos_scores.size() + neg_scores.size()));
    for (double s : pos_scores) entries.push_back({s, true});
    for (double s : neg_scores) entries.push_back({s, false});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.score > b.score; });

    std::vector<std::pair<double, double>> points;
    points.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].positive)
            ++tp;
        else
            ++fp;
        // Emit once per distinct threshold value.
        if (i + 1 < entries.size() && entries[i + 1].score == entries[i].score) continue;
        points.emplace_back(static_cast<double>(fp) / n, static_cast<double>(tp) / m);
    }
    return points;
}

}  // namespace paucens
