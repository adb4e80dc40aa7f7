#include "fingerlab/marking/schedule.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace fingerlab::marking {

std::vector<MarkingAssignment> generate_marking_schedule(const dataset::DatabaseManifest& manifest, int subjects,
                                                         int capacity) {
    if (!manifest.complete()) throw ScheduleError("manifest for " + manifest.spec.db_id + " is incomplete");
    return generate_marking_schedule(manifest.spec.db_id, manifest.spec.fingers, manifest.spec.impressions_per_finger,
                                     subjects, capacity);
}

std::vector<MarkingAssignment> generate_marking_schedule(const std::string& db_id, int fingers, int impressions,
                                                         int subjects, int capacity) {
    if (fingers < 1 || impressions < 1) throw InvalidArgument("fingers and impressions must be positive");
    if (subjects < 1) throw InvalidArgument("subject count must be positive");
    if (capacity < 1) throw InvalidArgument("capacity must be positive");
    if (impressions % subjects != 0) {
        throw ScheduleError(std::to_string(impressions) + " impressions cannot be split evenly among " +
                            std::to_string(subjects) + " subjects");
    }
    const int per_day = std::min(capacity, fingers);
    std::vector<MarkingAssignment> out;
    for (int s = 1; s <= subjects; ++s) {
        std::vector<dataset::ImageRef> sequence;
        for (int k = s; k <= impressions; k += subjects) {
            for (int f = 1; f <= fingers; ++f) sequence.push_back({db_id, f, k});
        }
        int day = 0;
        for (std::size_t start = 0; start < sequence.size(); start += static_cast<std::size_t>(per_day)) {
            const auto end = std::min(sequence.size(), start + static_cast<std::size_t>(per_day));
            out.push_back({s, ++day, {sequence.begin() + static_cast<std::ptrdiff_t>(start),
                                      sequence.begin() + static_cast<std::ptrdiff_t>(end)}});
        }
    }
    return out;
}

std::vector<std::string> validate_schedule(const std::vector<MarkingAssignment>& schedule, const ScheduleShape& shape) {
    std::vector<std::string> problems;
    auto report = [&](std::string msg) { problems.push_back(std::move(msg)); };
    if (shape.subjects < 1 || shape.impressions % shape.subjects != 0) {
        report("shape does not split impressions evenly among subjects");
        return problems;
    }

    std::map<dataset::ImageRef, int> owner;
    std::map<int, int> per_subject;
    std::map<std::tuple<int, int>, int> per_subject_finger;
    std::map<std::tuple<int, int, int>, int> per_subject_day_finger;
    std::set<std::tuple<int, int>> seen_days;
    for (const auto& a : schedule) {
        const auto where = "subject " + std::to_string(a.subject_id) + " day " + std::to_string(a.day_index);
        if (a.subject_id < 1 || a.subject_id > shape.subjects) report(where + ": subject out of range");
        if (a.day_index < 1) report(where + ": day index must be positive");
        if (!seen_days.insert({a.subject_id, a.day_index}).second) report(where + ": listed twice");
        if (static_cast<int>(a.images.size()) > shape.capacity) {
            report(where + ": " + std::to_string(a.images.size()) + " images exceed capacity " +
                   std::to_string(shape.capacity));
        }
        for (const auto& img : a.images) {
            if (img.db_id != shape.db_id || img.finger < 1 || img.finger > shape.fingers || img.impression < 1 ||
                img.impression > shape.impressions) {
                report(where + ": image " + img.label() + " is not in the database");
                continue;
            }
            const auto [it, fresh] = owner.emplace(img, a.subject_id);
            if (!fresh) {
                report(where + ": image " + img.label() + " already assigned to subject " + std::to_string(it->second));
                continue;
            }
            ++per_subject[a.subject_id];
            ++per_subject_finger[{a.subject_id, img.finger}];
            if (++per_subject_day_finger[{a.subject_id, a.day_index, img.finger}] == 2) {
                report(where + ": two impressions of finger " + std::to_string(img.finger) + " on the same day");
            }
        }
    }

    const int total = shape.fingers * shape.impressions;
    if (static_cast<int>(owner.size()) != total) {
        report(std::to_string(owner.size()) + " of " + std::to_string(total) + " images assigned");
    }
    const int per_finger = shape.impressions / shape.subjects;
    for (int s = 1; s <= shape.subjects; ++s) {
        const int n = per_subject.contains(s) ? per_subject.at(s) : 0;
        if (n != total / shape.subjects) {
            report("subject " + std::to_string(s) + " has " + std::to_string(n) + " images, expected " +
                   std::to_string(total / shape.subjects));
        }
        for (int f = 1; f <= shape.fingers; ++f) {
            const auto it = per_subject_finger.find({s, f});
            const int m = it == per_subject_finger.end() ? 0 : it->second;
            if (m != per_finger) {
                report("subject " + std::to_string(s) + " has " + std::to_string(m) + " impressions of finger " +
                       std::to_string(f) + ", expected " + std::to_string(per_finger));
            }
        }
    }
    return problems;
}

int schedule_days(const std::vector<MarkingAssignment>& schedule, int subject_id) {
    int days = 0;
    for (const auto& a : schedule) {
        if (a.subject_id == subject_id) days = std::max(days, a.day_index);
    }
    return days;
}

void write_schedule_csv(std::ostream& out, const std::vector<MarkingAssignment>& schedule) {
    out << "subject,day,db,finger,impression\n";
    for (const auto& a : schedule) {
        for (const auto& img : a.images) {
            out << a.subject_id << ',' << a.day_index << ',' << img.db_id << ',' << img.finger << ',' << img.impression
                << '\n';
        }
    }
}

}  // namespace fingerlab::marking
