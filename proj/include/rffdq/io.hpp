#pragma once

#include <json.hpp>
#include <memory>
#include <string>

#include "rffdq/bounds.hpp"
#include "rffdq/freqcore.hpp"
#include "rffdq/freqsample.hpp"
#include "rffdq/kernelmap.hpp"
#include "rffdq/pqcsim.hpp"
#include "rffdq/regress.hpp"

namespace rffdq::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json parse_json(const std::string& text);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
/// Shortest round-trip decimal form.
std::string format_number(double v);

/// {"dimensions": [[[e, ...], ...], ...]}
EncodingStrategy encoding_from_json(const json& j);
json encoding_to_json(const EncodingStrategy& enc);

/// {"d": d, "terms": [{"omega": [...], "re": .., "im": ..}]}, canonical half only. An
/// embedded "encoding" member is written when known and used when fs is null.
TrigPolynomial trig_from_json(const json& j, std::shared_ptr<const FrequencySet> fs);
json trig_to_json(const TrigPolynomial& f, const EncodingStrategy* enc = nullptr);

/// Either a bare array or {"weights": [...]}.
std::vector<double> weights_from_json(const json& j);

/// {"kind": "explicit" | "product" | "mps" | "uniform", ...}
FrequencyDistribution distribution_from_json(const json& j, std::shared_ptr<const FrequencySet> fs);
json distribution_to_json(const FrequencyDistribution& dist);

/// {"qubits": q, "gates": [...], "observable": {"terms": [...]}}; data dimensions are 1-based.
std::pair<Circuit, Observable> circuit_from_json(const json& j);
std::vector<double> theta_from_json(const json& j);

json model_to_json(const FittedModel& model);
FittedModel model_from_json(const json& j);

/// Header x_1,...,x_d,y.
Dataset dataset_from_csv(const std::string& text, std::string meta = {});
std::string dataset_to_csv(const Dataset& data);
/// Points without labels (header optional; all columns are coordinates).
Eigen::MatrixXd points_from_csv(const std::string& text);

json bounds_to_json(const BoundsReport& r);
json lower_bound_to_json(const LowerBoundReport& r);
json feasibility_to_json(const FeasibilityReport& r);

}  // namespace rffdq::io
