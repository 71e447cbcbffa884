"""Reserved control markers used in prompts and model output."""

END = "<end>"
STOP = "<stop>"
CHARACTER_TAG = "<character>"
DESCRIPTION_TAG = "<description>"
SCENES_TAG = "<scenes>"
DIALOG_TAG = "<dialog>"

RESERVED_MARKERS = (END, STOP, CHARACTER_TAG, DESCRIPTION_TAG, SCENES_TAG, DIALOG_TAG)


def find_reserved_marker(text: str) -> str | None:
    """Return the first reserved marker occurring in ``text``, if any."""
    for marker in RESERVED_MARKERS:
        if marker in text:
            return marker
    return None
