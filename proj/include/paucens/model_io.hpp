#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "paucens/baseline.hpp"
#include "paucens/ensemble.hpp"
#include "paucens/weaklearn.hpp"

namespace paucens {

/// Method-tagged scoring model as persisted on disk. Floats are written
/// as shortest round-trip decimals, so save/load is exact.
struct Model {
    std::string method;  // "pauc-ens" or "adaboost"
    std::vector<WeakLearner> learners;
    Eigen::VectorXd w;
    Eigen::Index dim = 0;
    double alpha = 0, beta = 1;  // pauc-ens only
    double nu = 0;               // pauc-ens only
    double shrinkage = 1;        // adaboost only

    double score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

Model to_model(const EnsembleModel& model);
Model to_model(const AdaBoostModel& model);

std::string model_to_string(const Model& model);
Model model_from_string(const std::string& text);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace paucens
