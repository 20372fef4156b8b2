(function ($) {
  function supportsPlaceholder() {
    var el = document.createElement('input');
    return 'placeholder' in el;
  }

  $(function () {
    if (!supportsPlaceholder()) {
      var searchInput = $('#searchInput'),
        placeholder = searchInput.attr('placeholder');
      searchInput.val(placeholder).focus(function () {
        var $this = $(this);
        $this.addClass('touched');
      });
    }

    $('.post h2').click(function () {
      $(this).closest('.post').append('<div class="alert"><span class="close">x</span> Saved.</div>');
    });

    $('#main').on('click', '.close', function () {
      $(this).parent().fadeOut(200);
    });
  });
})(jQuery);
