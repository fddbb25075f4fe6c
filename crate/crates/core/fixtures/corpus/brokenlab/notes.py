# Notes file that is mostly prose comments.
# The measurements drifted after the third run; see the calibration
# spreadsheet before trusting anything below.

RUNS = ['a1', 'a2', 'b1']

# TODO drop b1 once the rig is fixed
LABELS = {
    'a1': 'baseline',
    'a2': 'warm start',
    'b1': 'suspect',
}


def label_for(run):
    return LABELS.get(run, 'unknown')
