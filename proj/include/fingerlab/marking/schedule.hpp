#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "fingerlab/dataset/image_ref.hpp"
#include "fingerlab/dataset/manifest.hpp"
#include "fingerlab/error.hpp"

namespace fingerlab::marking {

// One subject's work for one day.
struct MarkingAssignment {
    int subject_id = 0;  // 1..S
    int day_index = 0;   // 1..D
    std::vector<dataset::ImageRef> images;

    friend bool operator==(const MarkingAssignment&, const MarkingAssignment&) = default;
};

class ScheduleError : public Error {
public:
    using Error::Error;
};

// Subject s marks impressions s, s+S, s+2S, ... of every finger. Days are
// filled with impression s of fingers 1..F first, then s+S, and so on, at
// most min(capacity, F) images a day, so two impressions of one finger
// never share a day. Assignments are ordered by (subject, day).
// Throws ScheduleError unless K is a multiple of S, and InvalidArgument for
// non-positive counts.
std::vector<MarkingAssignment> generate_marking_schedule(const dataset::DatabaseManifest& manifest, int subjects,
                                                         int capacity);
std::vector<MarkingAssignment> generate_marking_schedule(const std::string& db_id, int fingers, int impressions,
                                                         int subjects, int capacity);

struct ScheduleShape {
    std::string db_id;
    int fingers = 0;
    int impressions = 0;
    int subjects = 0;
    int capacity = 0;
};

// Checks a schedule against the shape without assuming how it was built:
// every image exactly once, F*K/S images and K/S impressions per finger for
// each subject, no same-finger pair on one subject-day, per-day load within
// capacity. Returns one message per problem; empty when valid.
std::vector<std::string> validate_schedule(const std::vector<MarkingAssignment>& schedule, const ScheduleShape& shape);

int schedule_days(const std::vector<MarkingAssignment>& schedule, int subject_id);

// `subject,day,db,finger,impression`, one row per image.
void write_schedule_csv(std::ostream& out, const std::vector<MarkingAssignment>& schedule);

}  // namespace fingerlab::marking
