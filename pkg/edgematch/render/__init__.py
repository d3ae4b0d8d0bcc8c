from edgematch.render.svg import (
    render_lp_trace,
    render_puzzle,
    render_rotation_copies,
    render_sdp_trace,
    to_string,
    write_svg,
)

__all__ = ["render_lp_trace", "render_puzzle", "render_rotation_copies", "render_sdp_trace", "to_string", "write_svg"]
