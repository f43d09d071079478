#pragma once

#include <random>

#include "sabd/hand_description.hpp"

namespace testing_support {

inline const sabd::HandModelPtr& default_model() {
    static const sabd::HandModelPtr model = sabd::load_default_hand();
    return model;
}

inline sabd::JointVector random_q(const sabd::HandModel& model, std::mt19937_64& rng) {
    sabd::JointVector q = model.zero_vector();
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& lim = model.limits(i);
        q[i] = std::uniform_real_distribution<double>(lim.lo, lim.hi)(rng);
    }
    return q;
}

inline nlohmann::json default_document() { return nlohmann::json::parse(sabd::default_hand_document()); }

}  // namespace testing_support
