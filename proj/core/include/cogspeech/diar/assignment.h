#ifndef COGSPEECH_DIAR_ASSIGNMENT_H_
#define COGSPEECH_DIAR_ASSIGNMENT_H_

#include <vector>

namespace cogspeech::diar {

// Maximum-weight one-to-one assignment on a rows x cols weight matrix
// (Hungarian method, exact). Returns the column assigned to each row, or -1.
// Rows are never left unassigned while a column is free, so callers that
// want a partial mapping drop pairs whose weight is zero.
std::vector<int> MaxWeightAssignment(
    const std::vector<std::vector<double>>& weights);

}  // namespace cogspeech::diar

#endif  // COGSPEECH_DIAR_ASSIGNMENT_H_
