#include "trendkit/dataset.hpp"

namespace trendkit {

namespace {

// Blood urea nitrogen from the 13-week sodium dichromate dihydrate study,
// six dose groups of ten rats.
const char* kBun =
    "dose,BUN\n"
    "0,15\n0,15.2\n0,14.9\n0,15.4\n0,16.8\n0,14.1\n0,14.9\n0,14.5\n0,13.7\n0,12.9\n"
    "62.5,15.8\n62.5,16.6\n62.5,12.7\n62.5,15.4\n62.5,14\n62.5,20.8\n62.5,19.1\n"
    "62.5,18.7\n62.5,18.8\n62.5,17.5\n"
    "125,21.9\n125,17.5\n125,21.3\n125,20.4\n125,18.2\n125,15.4\n125,15.2\n125,13\n"
    "125,14.7\n125,15.7\n"
    "250,15.7\n250,13.4\n250,15.1\n250,14.2\n250,15.2\n250,17.9\n250,18.2\n250,21.8\n"
    "250,18.2\n250,15.6\n"
    "500,22.3\n500,18.6\n500,22\n500,19.9\n500,19.6\n500,21\n500,21.7\n500,19.7\n"
    "500,18.8\n500,18.6\n"
    "1000,14.9\n1000,15.2\n1000,15.2\n1000,12.4\n1000,13.7\n1000,14.2\n1000,15\n"
    "1000,14.5\n1000,16.3\n1000,17.1\n";

// Crude malign lymphoma rates in male mice from four glyphosate
// carcinogenicity assays.
const char* kGlyphosate =
    "study,dose,tumor,mice\n"
    "A,0,2,48\nA,157,5,49\nA,814,4,50\nA,4841,2,49\n"
    "B,0,4,50\nB,100,2,50\nB,300,1,50\nB,1000,6,50\n"
    "C,0,2,50\nC,165,2,50\nC,838,0,50\nC,4348,6,50\n"
    "D,0,0,51\nD,71,1,51\nD,234,2,51\nD,810,5,51\n";

} // namespace

const char* embedded_dataset_csv(const std::string& name) {
    if (name == "bun") return kBun;
    if (name == "glyphosate") return kGlyphosate;
    return nullptr;
}

std::vector<std::string> embedded_dataset_names() { return {"bun", "glyphosate"}; }

} // namespace trendkit
