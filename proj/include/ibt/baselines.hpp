#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ibt/classifier.hpp"

namespace ibt {

struct TbcDecision {
    double t2_plus = 0.0;   ///< t* placed with the positives
    double t2_minus = 0.0;  ///< t* placed with the negatives
    std::size_t label = 0;  ///< 1 = positive; meaningful only when !failed
    bool failed = false;
};

struct IdcDecision {
    double bf0 = 0.0;
    double bf1 = 0.0;
    double bf2 = 0.0;
    std::size_t label = 0;  ///< 1 = positive

    double delta_plus() const;
    double delta_minus() const;
};

/**
 * Hotelling T^2 one-vs-rest classifier.
 *
 * For class c with t* added, T^2 = ab/(a+b) dm' S^-1 dm where S is the pooled
 * covariance of (class c + t*) and the rest. The class whose statistic grows
 * the most (sharpest separation) wins. Training fails outright when a class
 * has no more rows than there are features; a numerically singular pooled
 * covariance fails the individual query.
 */
class TbcModel {
public:
    explicit TbcModel(const TrainingSet& train);

    struct Result {
        std::vector<double> t2;  ///< per class
        std::size_t label = 0;
        bool failed = false;
    };

    bool failed() const noexcept { return failed_; }
    Result classify(std::span<const double> t) const;

private:
    struct Side {
        double count = 0.0;
        Eigen::VectorXd mean;
        Eigen::MatrixXd scatter;
    };
    std::size_t features_;
    bool failed_ = false;
    std::vector<Side> target_;
    std::vector<Side> rest_;
};

/**
 * Interpoint-distance classifier. BF = 2 d_between - d_within(A) - d_within(B)
 * from average distances; class c scores |BF(c + t*, rest) - BF(c, rest)| and
 * the smallest score wins. Classes with fewer than two training rows score +inf.
 */
class IdcModel {
public:
    IdcModel(const TrainingSet& train, Distance kind = Distance::euclidean);

    struct Result {
        std::vector<double> score;
        std::vector<double> bf0;
        std::vector<double> bf1;
        std::size_t label = 0;
    };

    Result classify(std::span<const double> t) const;

private:
    const TrainingSet* train_;
    Distance kind_;
    std::vector<double> within_;   ///< per class: sum over unordered pairs
    std::vector<double> between_;  ///< per class: sum over pairs with one end in the class
    std::vector<double> rest_within_;
};

TbcDecision tbc_classify(std::span<const double> t, MatrixView pos, MatrixView neg);
IdcDecision idc_classify(std::span<const double> t, MatrixView pos, MatrixView neg,
                         Distance kind = Distance::euclidean);

/// Majority vote among the k nearest (boundary ties included); vote ties go to the lowest class index.
std::size_t knn_from_distances(std::span<const double> dist, std::span<const std::size_t> labels,
                               std::size_t classes, std::size_t k);
std::size_t knn_classify(std::span<const double> t, const TrainingSet& train, std::size_t k,
                         Distance kind = Distance::euclidean);

}  // namespace ibt
