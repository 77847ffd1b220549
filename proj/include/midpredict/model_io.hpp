#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "midpredict/classifier.hpp"
#include "midpredict/report.hpp"

namespace midpredict {

// JSON document holding the classifier, its normalizer, training settings and seed.
// Doubles are written in shortest round-trip form, so load(save(m)) == m exactly.
std::string model_to_text(const TrainedModel& model, const Provenance& provenance);
TrainedModel model_from_text(std::string_view text, const std::string& source = "<model>");

void save_model(const TrainedModel& model, const std::filesystem::path& path, const Provenance& provenance);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace midpredict
