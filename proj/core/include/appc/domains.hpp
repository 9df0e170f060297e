#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "appc/lang.hpp"

namespace appc {

// One unit of evaluation: a visible sequence, held-out ground truth, given
// background facts, and a template source.
struct ApperceptionTask {
    enum Kind { Prediction, Retrodiction, Imputation };

    std::string name;
    Kind kind = Prediction;
    SignaturePtr sig;  // vocabulary of visible/hidden/background atoms
    SensorySequence visible;
    std::vector<std::pair<std::size_t, Atom>> hidden;  // (1-based time, atom)
    std::vector<Atom> background;                      // given initial knowledge
    std::string template_file;                         // empty = domain-independent iterator

    // visible and hidden merged back into one full sequence
    SensorySequence full_sequence() const;
};

std::string kind_to_string(ApperceptionTask::Kind k);
ApperceptionTask::Kind kind_from_string(const std::string& s);

ApperceptionTask parse_task(const std::string& text);
std::string serialize_task(const ApperceptionTask& t);

// --- elementary cellular automata ---

struct EcaSequence {
    SignaturePtr sig;  // cells c1..cN with on/off
    SensorySequence seq;
};

// Circular-array simulation under standard Wolfram numbering: bit i of the
// rule byte is the next cell value for neighbourhood pattern i, patterns
// ordered 111=7 .. 000=0 as (left, self, right). No spatial relation atoms
// are emitted.
EcaSequence eca_generate(int rule, int cells, int steps, const std::vector<bool>& init);

std::vector<bool> eca_next_row(int rule, const std::vector<bool>& row);

// Template family for ECA tasks at a given cell count (on/off/r, escalating
// rule bounds).
std::vector<Template> eca_templates(int cells);

// --- Seek Whence / C-test letter sequences ---

// One sensor reading value(s, l_x) per step over letters a..f; the successor
// chain (wrapped, so ∃! covers it) ships as background; the final step is
// held out for prediction.
ApperceptionTask seek_whence_task(const std::string& letters);
std::vector<Template> seek_whence_templates();

// --- drum rhythms and nursery tunes ---

struct NoteEvent {
    int time = 1;  // 1-based step
    std::string note;
};

// Loudness model: 3 at a press, then decaying 2,1,0 unless re-pressed.
ApperceptionTask rhythm_tune_task(const std::vector<NoteEvent>& events,
                                  const std::vector<std::string>& sensors, int steps);
std::vector<Template> rhythm_templates(const std::vector<std::string>& sensors);

// --- multi-modal binding ---

// Light sensors mirror cell state as black/white; touch sensors read 3 while
// their cell is on and decay 2,1,0 otherwise.
ApperceptionTask binding_generate(int rule, int cells, const std::vector<bool>& init,
                                  const std::vector<int>& touch_cells, int steps);
std::vector<Template> binding_templates(int cells, int touches);

// --- occlusion ---

struct Mover {
    int row = 1;        // 1-based, row 1 at the top; the eye looks up from below
    int start_col = 1;  // 1-based
    int direction = 1;  // +1 right, -1 left
    int speed = 1;
};

// Movers wrap horizontally; a mover is occluded when another mover occupies a
// lower row of the same column. Occluded positions become held-out data
// (imputation).
ApperceptionTask occlusion_generate(int width, int height, const std::vector<Mover>& movers,
                                    int steps);
std::vector<Template> occlusion_templates(int width, int height, int movers);

}  // namespace appc
