#include "paucens/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "paucens/errors.hpp"

namespace paucens {

namespace {

constexpr const char* kMagic = "paucens-model v1";

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& token, const std::string& context) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw DataError("model: bad number '" + token + "' in " + context);
    return value;
}

long parse_long(const std::string& token, const std::string& context) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw DataError("model: bad integer '" + token + "' in " + context);
    return value;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) out.push_back(token);
    return out;
}

}  // namespace

double Model::score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (dim > 0 && x.size() != dim)
        throw std::invalid_argument("score: expected dimension " + std::to_string(dim) +
                                    ", got " + std::to_string(x.size()));
    double total = 0;
    for (std::size_t t = 0; t < learners.size(); ++t)
        total += w[static_cast<Eigen::Index>(t)] * predict(learners[t], x);
    return total;
}

Eigen::VectorXd Model::scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = score(X.row(i).transpose());
    return out;
}

Model to_model(const EnsembleModel& model) {
    Model out;
    out.method = "pauc-ens";
    out.learners = model.learners;
    out.w = model.w;
    out.dim = model.dim;
    out.alpha = model.range.alpha;
    out.beta = model.range.beta;
    out.nu = model.nu;
    return out;
}

Model to_model(const AdaBoostModel& model) {
    Model out;
    out.method = "adaboost";
    out.learners = model.learners;
    out.w = model.w;
    out.dim = model.dim;
    out.shrinkage = model.shrinkage;
    return out;
}

std::string model_to_string(const Model& model) {
    std::ostringstream out;
    out << kMagic << '\n';
    out << "method " << model.method << '\n';
    out << "dim " << model.dim << '\n';
    if (model.method == "pauc-ens") {
        out << "alpha " << fmt(model.alpha) << '\n';
        out << "beta " << fmt(model.beta) << '\n';
        out << "nu " << fmt(model.nu) << '\n';
    } else {
        out << "shrinkage " << fmt(model.shrinkage) << '\n';
    }
    out << "learners " << model.learners.size() << '\n';
    for (const WeakLearner& learner : model.learners) {
        if (const auto* stump = std::get_if<DecisionStump>(&learner)) {
            out << "stump " << stump->feature << ' ' << stump->cut << ' '
                << fmt(stump->threshold) << ' ' << stump->polarity << '\n';
        } else {
            const auto& tree = std::get<DecisionTree>(learner);
            out << "tree " << tree.depth << ' ' << tree.nodes.size() << '\n';
            for (const DecisionTree::Node& node : tree.nodes) {
                if (node.leaf())
                    out << "node leaf " << node.label << '\n';
                else
                    out << "node split " << node.feature << ' ' << node.cut << ' '
                        << fmt(node.threshold) << ' ' << node.lo << ' ' << node.hi
                        << '\n';
            }
        }
    }
    out << "w";
    for (Eigen::Index t = 0; t < model.w.size(); ++t) out << ' ' << fmt(model.w[t]);
    out << "\nend\n";
    return out.str();
}

Model model_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw DataError(std::string("model: missing ") + what);
        return tokens_of(line);
    };

    if (!std::getline(in, line) || line != kMagic)
        throw DataError("model: bad header (expected '" + std::string(kMagic) + "')");

    Model model;
    auto method_tokens = next_line("method");
    if (method_tokens.size() != 2 || method_tokens[0] != "method")
        throw DataError("model: expected 'method <name>'");
    model.method = method_tokens[1];
    if (model.method != "pauc-ens" && model.method != "adaboost")
        throw DataError("model: unknown method '" + model.method + "'");

    auto dim_tokens = next_line("dim");
    if (dim_tokens.size() != 2 || dim_tokens[0] != "dim")
        throw DataError("model: expected 'dim <d>'");
    model.dim = parse_long(dim_tokens[1], "dim");

    if (model.method == "pauc-ens") {
        for (const char* key : {"alpha", "beta", "nu"}) {
            auto kv = next_line(key);
            if (kv.size() != 2 || kv[0] != key)
                throw DataError(std::string("model: expected '") + key + " <value>'");
            const double value = parse_double(kv[1], key);
            if (kv[0] == std::string("alpha")) model.alpha = value;
            if (kv[0] == std::string("beta")) model.beta = value;
            if (kv[0] == std::string("nu")) model.nu = value;
        }
    } else {
        auto kv = next_line("shrinkage");
        if (kv.size() != 2 || kv[0] != "shrinkage")
            throw DataError("model: expected 'shrinkage <value>'");
        model.shrinkage = parse_double(kv[1], "shrinkage");
    }

    auto count_tokens = next_line("learners");
    if (count_tokens.size() != 2 || count_tokens[0] != "learners")
        throw DataError("model: expected 'learners <count>'");
    const long count = parse_long(count_tokens[1], "learners");

    for (long i = 0; i < count; ++i) {
        auto head = next_line("learner");
        if (head.size() == 5 && head[0] == "stump") {
            DecisionStump stump;
            stump.feature = parse_long(head[1], "stump feature");
            stump.cut = static_cast<int>(parse_long(head[2], "stump cut"));
            stump.threshold = parse_double(head[3], "stump threshold");
            stump.polarity = static_cast<int>(parse_long(head[4], "stump polarity"));
            model.learners.emplace_back(stump);
        } else if (head.size() == 3 && head[0] == "tree") {
            DecisionTree tree;
            tree.depth = static_cast<int>(parse_long(head[1], "tree depth"));
            const long nodes = parse_long(head[2], "tree nodes");
            for (long k = 0; k < nodes; ++k) {
                auto fields = next_line("node");
                if (fields.size() == 3 && fields[0] == "node" && fields[1] == "leaf") {
                    DecisionTree::Node node;
                    node.label = static_cast<int>(parse_long(fields[2], "leaf label"));
                    tree.nodes.push_back(node);
                } else if (fields.size() == 7 && fields[0] == "node" &&
                           fields[1] == "split") {
                    DecisionTree::Node node;
                    node.feature = parse_long(fields[2], "node feature");
                    node.cut = static_cast<int>(parse_long(fields[3], "node cut"));
                    node.threshold = parse_double(fields[4], "node threshold");
                    node.lo = static_cast<int>(parse_long(fields[5], "node lo"));
                    node.hi = static_cast<int>(parse_long(fields[6], "node hi"));
                    node.label = 0;
                    tree.nodes.push_back(node);
                } else {
                    throw DataError("model: bad node line '" + line + "'");
                }
            }
            model.learners.emplace_back(std::move(tree));
        } else {
            throw DataError("model: bad learner line '" + line + "'");
        }
    }

    auto w_tokens = next_line("w");
    if (w_tokens.empty() || w_tokens[0] != "w" ||
        w_tokens.size() != static_cast<std::size_t>(count) + 1)
        throw DataError("model: expected 'w' with one value per learner");
    model.w.resize(count);
    for (long t = 0; t < count; ++t)
        model.w[t] = parse_double(w_tokens[static_cast<std::size_t>(t) + 1], "w");

    auto end_tokens = next_line("end");
    if (end_tokens.size() != 1 || end_tokens[0] != "end")
        throw DataError("model: missing 'end'");
    return model;
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << model_to_string(model);
    if (!out) throw DataError("write failed for '" + path + "'");
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_string(buffer.str());
}

}  // namespace paucens
