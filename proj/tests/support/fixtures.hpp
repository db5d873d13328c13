#pragma once

#include <string>

#include "penaltylab/problem_file.hpp"

namespace fixture {

inline penaltylab::ProblemFile corpus(const std::string& name) {
  return penaltylab::load_problem_file(std::string(PENALTYLAB_CORPUS_DIR) + "/" + name + ".problem");
}

inline penaltylab::ProblemFile inline_problem(const std::string& text) { return penaltylab::parse_problem_file(text); }

}  // namespace fixture
