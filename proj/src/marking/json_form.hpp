#pragma once

#include <json.hpp>

#include "fingerlab/marking/service.hpp"

namespace fingerlab::marking::detail {

using nlohmann::json;

// API form of a template, as served to the marking client.
json state_to_api(const TemplateState& state);
json revision_to_api(const RevisionEntry& entry);
json schedule_to_api(const std::vector<MarkingAssignment>& schedule);
json violations_to_api(const std::vector<fmr::Violation>& violations);

// Body of PUT templates/... and of a "modify" review. Throws InvalidArgument.
Submission submission_from_api(const json& body);

// Persistent forms; the record is kept as its lossless text rendering.
json state_to_disk(const TemplateState& state);
TemplateState state_from_disk(const json& j);
json revision_to_disk(const RevisionEntry& entry);
RevisionEntry revision_from_disk(const json& j);

}  // namespace fingerlab::marking::detail
