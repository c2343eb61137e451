"""Prompt templates for the vision-language detector."""

from langchain_core.prompts import PromptTemplate

# Object recognition prompt; the last paragraph pins the reply format
DETECTION_PROMPT = PromptTemplate(
    input_variables=["object_list"],
    template="""You are an image recognition assistant. From the list below, identify only the objects that are clearly visible in the image. Include partially visible objects. Do not include any object if you are not confident it is present. Object list: {object_list}

Reply with one object name per line, copied exactly from the list. If none of the objects are visible, reply with the single word: none""",
)


def format_detection_prompt(labels) -> str:
    """Render the detection prompt for the given map labels."""
    return DETECTION_PROMPT.format(object_list=", ".join(labels))
