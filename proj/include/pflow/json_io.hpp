#pragma once

#include <json.hpp>
#include <string>

#include "pflow/flow_solve.hpp"
#include "pflow/graph.hpp"
#include "pflow/metric_props.hpp"
#include "pflow/sparsify.hpp"
#include "pflow/transforms.hpp"

namespace pflow::json {

using nlohmann::json;

// Doubles rounded to 12 significant digits; non-finite values become "inf", "-inf" or "nan".
json num(double x);
json p_value(const PNormParam& p);
json matrix(const Eigen::MatrixXd& m);

// Adds the top-level "schema": "pflow.<name>/1" field.
json with_schema(const std::string& name, json body);

json to_json(const SolveReport& r);
json to_json(const DistanceMatrix& m);
json to_json(const FosterReport& r);
json to_json(const PStrongReport& r);
json to_json(const MonotonicityReport& r);
json to_json(const LambdaBoundReport& r);
json to_json(const CommuteReport& r, bool with_matrices);
json to_json(const TransformResult& r);
json to_json(const ObstructionReport& r);
json to_json(const StarMeshReport& r);
json to_json(const SamplingScores& s);
json to_json(const SparsifierResult& r);
json to_json(const VerifyReport& r);
json to_json(const RatioReport& r);
json to_json(const SymmetricFamilyReport& r);
json to_json(const DegreeConditionReport& r);
json to_json(const ExpanderReport& r);
json to_json(const UnionLowerBoundReport& r);

// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const json& j);

}  // namespace pflow::json
