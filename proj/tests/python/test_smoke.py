import _qpm

def test_placeholder():
    assert _qpm.__version__
