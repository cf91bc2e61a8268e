import pytest
from hypothesis import given, strategies as st

from commitlens import taxonomy
from commitlens.errors import EmptyAfterProjection, EmptyTagSet, InactiveTag, UnknownTag

CONFIG_NAMES = list(taxonomy.CONFIG_NAMES)


def test_closed_set_of_29():
    assert len(taxonomy.ALL_TAGS) == 29
    assert len(taxonomy.COMMIT_TYPES) == 29
    assert taxonomy.MAINTENANCE_SUB == {"replacement", "modification", "utility"}


@pytest.mark.parametrize("name,size", [("orig26", 26), ("all29", 29), ("no_maint28", 28), ("no_maint_no_sub25", 25)])
def test_config_sizes(name, size):
    assert len(taxonomy.get_config(name)) == size


def test_config_relations():
    c = taxonomy.CONFIGS
    assert c["orig26"].active_types == taxonomy.ALL_TAGS - taxonomy.MAINTENANCE_SUB
    assert c["no_maint28"].active_types == taxonomy.ALL_TAGS - {"maintenance"}
    assert c["no_maint_no_sub25"].active_types == c["orig26"].active_types - {"maintenance"}


def test_validate_ok():
    tags = taxonomy.validate_tagset({"build", "feature_add", "testing"}, "all29")
    assert tags == {"build", "feature_add", "testing"}


def test_validate_errors():
    with pytest.raises(InactiveTag):
        taxonomy.validate_tagset({"maintenance"}, "no_maint28")
    with pytest.raises(EmptyTagSet):
        taxonomy.validate_tagset(set(), "all29")
    with pytest.raises(UnknownTag):
        taxonomy.validate_tagset({"nonsense"}, "all29")
    with pytest.raises(ValueError):
        taxonomy.get_config("all30")


def test_project():
    assert taxonomy.project_tagset({"maintenance", "testing"}, "all29", "no_maint28") == {"testing"}
    assert taxonomy.project_tagset({"testing"}, "all29", "all29") == {"testing"}
    with pytest.raises(EmptyAfterProjection):
        taxonomy.project_tagset({"maintenance"}, "all29", "no_maint_no_sub25")


def test_display_names_and_slugify():
    assert taxonomy.display_name("feature_add") == "Feature Add"
    for t in taxonomy.COMMIT_TYPES:
        assert taxonomy.slugify(t.display_name) == t.id
        assert t.description


@given(
    st.sets(st.sampled_from(sorted(taxonomy.ALL_TAGS)), min_size=1),
    st.sampled_from(CONFIG_NAMES),
)
def test_projection_idempotent(tags, to):
    try:
        once = taxonomy.project_tagset(tags, "all29", to)
    except EmptyAfterProjection:
        return
    assert taxonomy.project_tagset(once, "all29", to) == once
    assert once <= taxonomy.get_config(to).active_types
